// Command-line driver. One positional command selects the mode; every option
// is a top-level flag so an INI config file (--config, `key = value`) can set
// any of them, with explicit flags taking precedence. Exit codes: 0 success
// (all checked bounds hold), 1 a checked bound is violated, 2 usage or input
// error. Outputs are plain files in --output; nothing carries timestamps, so
// a rerun with the same options is byte-identical.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sheetlab/experiments.hpp"
#include "sheetlab/occupation.hpp"
#include "sheetlab/parallel.hpp"
#include "sheetlab/report.hpp"

using namespace sheetlab;
namespace fs = std::filesystem;

namespace {

struct Options {
    std::string command;
    int n = 2, d = 1, points = 0, level = 6, rotations = 8, pairs = 200;
    int trials = 0, replicates = 0, pi_bits = -1, workers = 0;
    std::uint64_t seed = 1;
    double tol = 1e-8, alpha = 0.5, eps = 0.1, ratio = 0.2;
    double lower = 1.0, upper = 2.0, cell = 0.0;
    std::string set_kind, set_file, experiment, format = "both";
    std::string diagonal = "cell_average";
    std::string output = "sheetlab_out";
    std::vector<double> voxels, scales, weights, blocks;
    bool list = false, print_json = false;
};

double min_pairwise_gap(const DiscreteSet& f) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.points.size(); ++i)
        for (std::size_t j = i + 1; j < f.points.size(); ++j) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < f.points[i].size(); ++c) {
                const double dd = f.points[i][c] - f.points[j][c];
                d2 += dd * dd;
            }
            best = std::min(best, std::sqrt(d2));
        }
    return best;
}

DiscreteSet build_set(const Options& o, const std::string& fallback_kind,
                      int fallback_points) {
    if (!o.set_file.empty()) return DiscreteSet::from_file(o.set_file);
    const std::string kind = o.set_kind.empty() ? fallback_kind : o.set_kind;
    const int pts = o.points > 0 ? o.points : fallback_points;
    if (kind == "interval") return make_interval(0.0, 1.0, pts);
    if (kind == "square")
        return make_cube(GridSpec{0.0, 1.0, {pts, pts}});
    if (kind == "cantor") return make_cantor(o.level, o.ratio, 0.0, 1.0);
    if (kind == "cantor_product" || kind == "cantor2")
        return make_cantor_product(o.level, o.ratio, 0.0, 1.0);
    throw std::invalid_argument("unknown set kind: " + kind);
}

fs::path prepare_output(const Options& o) {
    fs::path out(o.output);
    fs::create_directories(out);
    return out;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const nlohmann::json& opts) {
    nlohmann::json j;
    j["command"] = command;
    j["options"] = opts;
    std::ofstream f(dir / "manifest.json");
    f << j.dump(2) << "\n";
}

int cmd_sample(const Options& o) {
    const int pts = o.points > 0 ? o.points : 8;
    const Grid g =
        Grid::uniform(GridSpec{o.lower, o.upper, std::vector<int>(o.n, pts)});
    const FieldSample s = sample_sheet(g, o.d, o.seed);
    const fs::path out = prepare_output(o);
    if (o.format == "binary" || o.format == "both")
        write_binary(s, (out / "sample.bin").string());
    if (o.format == "csv" || o.format == "both")
        write_csv(s, (out / "sample.csv").string());
    nlohmann::json opts{{"N", o.n},         {"d", o.d},
                        {"points", pts},    {"lower", o.lower},
                        {"upper", o.upper}, {"seed", o.seed},
                        {"format", o.format}};
    write_manifest(out, "sample", opts);
    std::printf("wrote %zu grid points x %d coordinates to %s\n", g.total(),
                o.d, out.string().c_str());
    return 0;
}

KernelSpec make_kernel(const Options& o, const DiscreteSet& f, double* cell) {
    if (o.diagonal == "exclude") {
        *cell = 0.0;
        return KernelSpec::riesz(o.alpha, DiagonalPolicy::exclude);
    }
    if (o.diagonal != "cell_average")
        throw std::invalid_argument("unknown diagonal policy: " + o.diagonal);
    *cell = o.cell > 0.0 ? o.cell : min_pairwise_gap(f);
    return KernelSpec::riesz(o.alpha, DiagonalPolicy::cell_average, *cell);
}

int cmd_capacity(const Options& o) {
    const DiscreteSet f = build_set(o, "interval", 64);
    double cell = 0.0;
    const KernelSpec ks = make_kernel(o, f, &cell);
    FrankWolfeOptions fw;
    fw.tol = o.tol;
    const CapacityResult res = capacity(f, ks, fw);
    const fs::path out = prepare_output(o);
    write_capacity_json(res, (out / "capacity.json").string());
    res.minimizer.to_csv((out / "equilibrium.csv").string());
    nlohmann::json opts{{"set", o.set_kind.empty() ? "interval" : o.set_kind},
                        {"set_file", o.set_file},
                        {"atoms", f.points.size()},
                        {"alpha", o.alpha},
                        {"diagonal", o.diagonal},
                        {"cell", cell},
                        {"level", o.level},
                        {"ratio", o.ratio},
                        {"tol", o.tol}};
    write_manifest(out, "capacity", opts);
    if (std::isinf(res.capacity))
        std::printf("energy %.12g, capacity inf (%s diagonal), %d iterations\n",
                    res.energy, res.diagonal_policy.c_str(), res.iterations);
    else
        std::printf("energy %.12g, capacity %.12g (%s diagonal), %d "
                    "iterations\n",
                    res.energy, res.capacity, res.diagonal_policy.c_str(),
                    res.iterations);
    return 0;
}

int cmd_localtime(const Options& o) {
    const int pts = o.points > 0 ? o.points : 32;
    const Grid g =
        Grid::uniform(GridSpec{o.lower, o.upper, std::vector<int>(o.n, pts)});
    const DiscreteMeasure mu = DiscreteMeasure::uniform(
        make_cube(GridSpec{o.lower, o.upper, std::vector<int>(o.n, pts)}));
    const int reps = o.replicates > 0 ? o.replicates : 8;
    std::vector<SupportValues> svs;
    for (int r = 0; r < reps; ++r)
        svs.push_back(support_values(sample_sheet(g, o.d, o.seed, r), mu));
    const double h = o.voxels.empty() ? o.eps : o.voxels[0];
    const SpatialGrid sg = fit_spatial_grid(svs, o.eps, h);
    const OccupationEstimate est =
        local_time_field(svs, mu.weights, sg, o.eps, o.seed, mu.hash());
    const fs::path out = prepare_output(o);
    write_occupation_csv(est, (out / "occupation.csv").string(),
                         (out / "occupation.json").string());
    nlohmann::json opts{{"N", o.n},           {"d", o.d},
                        {"points", pts},      {"lower", o.lower},
                        {"upper", o.upper},   {"eps", o.eps},
                        {"h", h},             {"replicates", reps},
                        {"seed", o.seed}};
    write_manifest(out, "localtime", opts);
    std::printf("wrote %zu spatial cells x %d replicates to %s\n",
                sg.cells(), reps, out.string().c_str());
    return 0;
}

int write_experiment_outputs(const ExperimentReport& rep, const Options& o,
                             const nlohmann::json& opts,
                             const std::string& command) {
    const fs::path out = prepare_output(o);
    write_report_json(rep, (out / "report.json").string());
    write_report_csv(rep, (out / "report.csv").string());
    write_manifest(out, command, opts);
    if (o.print_json)
        std::printf("%s\n", report_json(rep).dump(2).c_str());
    else
        std::printf("%s", report_summary(rep).c_str());
    return rep.all_satisfied() ? 0 : 1;
}

int cmd_verify(const Options& o, const CLI::App& app) {
    if (o.list) {
        for (const auto& info : experiment_registry())
            std::printf("%-14s %s\n", info.name.c_str(),
                        info.description.c_str());
        return 0;
    }
    if (o.experiment.empty()) {
        std::fprintf(stderr,
                     "verify needs --experiment NAME (or --list)\n");
        return 2;
    }
    ExperimentSettings s;
    if (app.count("--N")) s.n = o.n;
    if (app.count("--d")) s.d = o.d;
    if (app.count("--replicates")) s.replicates = o.replicates;
    if (app.count("--trials")) s.trials = o.trials;
    if (app.count("--points")) s.points = o.points;
    if (app.count("--level")) s.level = o.level;
    if (app.count("--rotations")) s.rotations = o.rotations;
    if (app.count("--pairs")) s.pairs = o.pairs;
    if (app.count("--pi")) s.pi = o.pi_bits;
    if (app.count("--eps")) s.eps = o.eps;
    if (app.count("--ratio")) s.ratio = o.ratio;
    if (app.count("--set")) s.set_kind = o.set_kind;
    s.voxels = o.voxels;
    s.seed = o.seed;

    const ExperimentReport rep = run_experiment(o.experiment, s);
    nlohmann::json opts{{"experiment", o.experiment},
                        {"seed", o.seed},
                        {"parameters", rep.parameters}};
    return write_experiment_outputs(rep, o, opts, "verify");
}

int cmd_dimension(const Options& o) {
    const DiscreteSet f = build_set(o, "cantor", 64);
    const std::vector<double> scales =
        o.scales.empty() ? std::vector<double>{0.2, 0.1, 0.05, 0.025, 0.0125}
                         : o.scales;
    const DimensionFit fit = box_dimension(f, scales);
    const fs::path out = prepare_output(o);
    nlohmann::json j{{"dimension", fit.dimension},
                     {"residual", fit.residual},
                     {"scales", fit.scales},
                     {"counts", fit.counts}};
    {
        std::ofstream file(out / "dimension.json");
        file << j.dump(2) << "\n";
    }
    nlohmann::json opts{{"set", o.set_kind.empty() ? "cantor" : o.set_kind},
                        {"set_file", o.set_file},
                        {"atoms", f.points.size()},
                        {"level", o.level},
                        {"ratio", o.ratio},
                        {"scales", scales}};
    write_manifest(out, "dimension", opts);
    std::printf("box dimension %.6g (fit residual %.3g) from %zu scales\n",
                fit.dimension, fit.residual, scales.size());
    return 0;
}

int cmd_selfintersect(const Options& o) {
    SelfIntersectionSpec spec;
    spec.r = o.weights.empty() ? std::vector<double>{1.0, 1.0} : o.weights;
    std::vector<double> flat =
        o.blocks.empty() ? std::vector<double>{1.0, 2.0, 3.0, 4.0} : o.blocks;
    if (flat.size() != 2 * spec.r.size()) {
        std::fprintf(stderr,
                     "--blocks needs one a b pair per weight (%zu values for "
                     "%zu weights)\n",
                     flat.size(), spec.r.size());
        return 2;
    }
    for (std::size_t i = 0; i < flat.size(); i += 2)
        spec.blocks.push_back({flat[i], flat[i + 1]});
    const int reps = o.replicates > 0 ? o.replicates : 50;
    const ExperimentReport rep = exp_mountford(spec, o.d, reps, o.seed);
    nlohmann::json opts{{"weights", spec.r},
                        {"blocks", flat},
                        {"d", o.d},
                        {"replicates", reps},
                        {"seed", o.seed}};
    return write_experiment_outputs(rep, o, opts, "selfintersect");
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"numerical laboratory for the N-parameter Brownian sheet"};
    app.set_config("--config", "", "read options from an INI file");
    app.add_option("command", o.command,
                   "sample | capacity | localtime | verify | dimension | "
                   "selfintersect")
        ->required()
        ->check(CLI::IsMember({"sample", "capacity", "localtime", "verify",
                               "dimension", "selfintersect"}));
    app.add_option("--N", o.n, "parameter dimension");
    app.add_option("--d", o.d, "value dimension");
    app.add_option("--points", o.points, "points per axis / atoms");
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--workers", o.workers, "worker threads (0 = automatic)");
    app.add_option("--tol", o.tol, "solver tolerance");
    app.add_option("--alpha", o.alpha, "Riesz exponent");
    app.add_option("--set", o.set_kind,
                   "set kind: interval | square | cantor | cantor_product");
    app.add_option("--set-file", o.set_file, "read the set from a file");
    app.add_option("--level", o.level, "Cantor construction level");
    app.add_option("--ratio", o.ratio, "Cantor contraction ratio");
    app.add_option("--eps", o.eps, "smoothing / hitting radius");
    app.add_option("--voxel", o.voxels, "voxel edge (repeat for a schedule)");
    app.add_option("--replicates", o.replicates, "Monte Carlo replicates");
    app.add_option("--trials", o.trials, "deterministic trial count");
    app.add_option("--rotations", o.rotations, "rotation cover size");
    app.add_option("--pairs", o.pairs, "point pairs to examine");
    app.add_option("--pi", o.pi_bits, "axis mask bits (-1 = all)");
    app.add_option("--diagonal", o.diagonal,
                   "energy diagonal policy: exclude | cell_average");
    app.add_option("--cell", o.cell,
                   "cell size for the cell_average diagonal (0 = smallest "
                   "pairwise gap)");
    app.add_option("--lower", o.lower, "box lower corner");
    app.add_option("--upper", o.upper, "box upper corner");
    app.add_option("--scales", o.scales, "box-counting scales");
    app.add_option("--weights", o.weights, "self-intersection weights");
    app.add_option("--blocks", o.blocks,
                   "flattened a b pairs of time blocks");
    app.add_option("--experiment", o.experiment, "experiment name");
    app.add_option("--output", o.output, "output directory");
    app.add_option("--format", o.format, "sample output format")
        ->check(CLI::IsMember({"csv", "binary", "both"}));
    app.add_flag("--list", o.list, "list available experiments");
    app.add_flag("--json", o.print_json, "print the full JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.count("--workers")) set_workers(o.workers);
        if (o.command == "sample") return cmd_sample(o);
        if (o.command == "capacity") return cmd_capacity(o);
        if (o.command == "localtime") return cmd_localtime(o);
        if (o.command == "verify") return cmd_verify(o, app);
        if (o.command == "dimension") return cmd_dimension(o);
        if (o.command == "selfintersect") return cmd_selfintersect(o);
        std::fprintf(stderr, "unknown command: %s\n", o.command.c_str());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
