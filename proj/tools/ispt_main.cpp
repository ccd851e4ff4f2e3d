// Command-line harness: builds/caches the trajectory ensemble, runs the three
// experiments, evaluates ad-hoc patterns, and renders figures.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ispt/experiments.hpp"
#include "ispt/render.hpp"

namespace {

using namespace ispt;

std::filesystem::path default_cache_path(const ExperimentConfig& cfg) {
    std::filesystem::path dir = ".";
    if (const char* env = std::getenv("ISPT_CACHE_DIR")) dir = env;
    std::ostringstream name;
    name << "ensemble_" << cfg.dims.width << "x" << cfg.dims.height << "_t" << cfg.t0 << "_L"
         << cfg.length << ".bin";
    return dir / name.str();
}

void add_common_options(CLI::App* app, ExperimentConfig& cfg, std::string& symmetry,
                        std::string& base, std::string& cache) {
    app->add_option("--width", cfg.dims.width, "grid width")->capture_default_str();
    app->add_option("--height", cfg.dims.height, "grid height")->capture_default_str();
    app->add_option("--t0", cfg.t0, "first window slice (1-based; t=1 is the initial state)")
        ->capture_default_str();
    app->add_option("--window", cfg.length, "window length in slices")->capture_default_str();
    app->add_option("--symmetry", symmetry, "orbit dedup group: translations|full")
        ->check(CLI::IsMember({"translations", "full"}))
        ->capture_default_str();
    app->add_option("--log-base", base, "evidence log base: 2|e|10|auto")
        ->check(CLI::IsMember({"2", "e", "10", "auto"}))
        ->capture_default_str();
    app->add_option("-n,--cells-per-slice", cfg.cells_per_slice,
                    "fixed cells per slice in the subset search")
        ->capture_default_str();
    app->add_option("--cache", cache,
                    "ensemble cache file (default under $ISPT_CACHE_DIR; 'none' disables)");
    app->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
    app->add_option("--threads", cfg.threads, "worker threads (0 = default)")
        ->capture_default_str();
}

ExperimentConfig finish_config(ExperimentConfig cfg, const std::string& symmetry,
                               const std::string& base, const std::string& cache) {
    cfg.symmetry =
        symmetry == "translations" ? SymmetryMode::translations : SymmetryMode::full;
    if (base == "2")
        cfg.base_mode = LogBaseMode::two;
    else if (base == "e")
        cfg.base_mode = LogBaseMode::natural;
    else if (base == "10")
        cfg.base_mode = LogBaseMode::ten;
    else
        cfg.base_mode = LogBaseMode::auto_calibrate;
    if (cache == "none")
        cfg.cache_path.clear();
    else if (!cache.empty())
        cfg.cache_path = cache;
    else
        cfg.cache_path = default_cache_path(cfg);
    return cfg;
}

/// Pattern file: one "t row col value" tuple per line, '#' comments.
SpatioTemporalPattern load_pattern_file(const std::filesystem::path& path,
                                        const EnsembleTable& tab) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    SpatioTemporalPattern pat;
    pat.dims = tab.dims();
    pat.start_time = tab.start_time();
    pat.slices.assign(tab.length(), SliceMask{});
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream in(line);
        int t, row, col, value;
        if (!(in >> t)) continue;
        if (!(in >> row >> col >> value) || (value != 0 && value != 1))
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected 't row col value(0|1)'");
        if (t < tab.start_time() || t >= tab.start_time() + tab.length() || row < 0 ||
            row >= tab.dims().height || col < 0 || col >= tab.dims().width)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": node outside the ensemble window");
        pat.set_node(NodeRef{t, row * tab.dims().width + col}, value != 0);
    }
    return pat;
}

std::vector<BitState> load_states_file(const std::filesystem::path& path, GridDims dims) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    std::vector<BitState> out;
    std::string grid, line;
    int rows = 0;
    auto flush = [&]() {
        if (rows == 0) return;
        out.push_back(parse_text(grid, dims));
        grid.clear();
        rows = 0;
    };
    while (std::getline(f, line)) {
        if (line.empty()) {
            flush();
            continue;
        }
        grid += line + "\n";
        if (++rows == dims.height) flush();
    }
    flush();
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"exact integrated spatiotemporal pattern analysis on toroidal game-of-life grids"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string symmetry = "full", base = "auto", cache;

    auto* build = app.add_subcommand("build-ensemble", "build and cache the trajectory ensemble");
    auto* exp1 = app.add_subcommand("experiment1", "rank all distinct windows by EVIFPP");
    auto* exp2 = app.add_subcommand("experiment2", "extremal n-cells-per-slice subset search");
    auto* exp3 = app.add_subcommand("experiment3", "re-evaluate the optimum on the shifted trajectory");
    auto* report = app.add_subcommand("report", "run all experiments and compare reference values");
    auto* evifpp_cmd = app.add_subcommand("evifpp", "evaluate a pattern file");
    auto* render = app.add_subcommand("render", "render grid-text slices as an SVG row");

    for (CLI::App* sub : {build, exp1, exp2, exp3, report, evifpp_cmd})
        add_common_options(sub, cfg, symmetry, base, cache);

    std::filesystem::path pattern_path;
    evifpp_cmd->add_option("pattern", pattern_path, "pattern file: 't row col value' lines")
        ->required();

    std::filesystem::path states_path, svg_path;
    render->add_option("states", states_path, "text file with '#'/'.' grids, blank-line separated")
        ->required();
    render->add_option("--out-svg", svg_path, "output SVG path")->required();
    render->add_option("--width", cfg.dims.width, "grid width")->capture_default_str();
    render->add_option("--height", cfg.dims.height, "grid height")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (render->parsed()) {
        const auto states = load_states_file(states_path, cfg.dims);
        write_svg(svg_path, {FigureRow{TrajectoryWindow{cfg.t0, states}, std::nullopt, ""}},
                  cfg.dims);
        std::cout << "wrote " << svg_path.string() << "\n";
        return 0;
    }

    cfg = finish_config(cfg, symmetry, base, cache);
    const EnsembleTable tab = obtain_ensemble(cfg);

    if (build->parsed()) {
        std::cout << "ensemble: " << tab.entries().size() << " distinct windows, total "
                  << tab.total() << ", cached at " << cfg.cache_path.string() << "\n";
        return 0;
    }

    const LogBase lb = resolve_log_base(cfg, tab);

    if (exp1->parsed()) {
        const auto res = run_experiment1_files(cfg, tab, lb);
        std::cout << "distinct windows: " << tab.entries().size()
                  << ", orbits: " << res.ranking.size() << "\n";
        std::cout << "blank EVIFPP: " << res.blank_evifpp << " (base " << log_base_name(lb)
                  << ")\n";
        for (std::size_t i = 0; i < res.ranking.size() && i < 5; ++i)
            std::cout << "rank " << i + 1 << ": EVIFPP " << res.ranking[i].evifpp << "\n";
        for (const auto& row : res.report)
            std::cout << row.name << ": " << row.computed << (row.pass ? " pass" : " FAIL")
                      << "\n";
        return 0;
    }
    if (exp2->parsed()) {
        const auto res = run_experiment2_files(cfg, tab, lb);
        std::cout << "reference window " << (res.found ? "matched" : "NOT matched") << "\n";
        std::cout << "global " << res.global_evifpp << ", min " << res.min_result.evifpp
                  << " (" << res.min_result.co_optimal << " co-optimal), max "
                  << res.max_result.evifpp << " (" << res.max_result.co_optimal
                  << " co-optimal) over " << res.max_result.candidates << " candidates\n";
        for (const auto& row : res.report)
            std::cout << row.name << ": " << row.computed << (row.pass ? " pass" : " FAIL")
                      << "\n";
        return 0;
    }
    if (exp3->parsed()) {
        const auto res = run_experiment3_files(cfg, tab, lb);
        std::cout << "unshifted nodes on shifted trajectory: " << res.unshifted_nodes_value
                  << "\n";
        std::cout << "shifted nodes on shifted trajectory: " << res.shifted_nodes_value
                  << " (unshifted optimum " << res.original_optimum << ")\n";
        for (const auto& row : res.report)
            std::cout << row.name << ": " << row.computed << (row.pass ? " pass" : " FAIL")
                      << "\n";
        return 0;
    }
    if (report->parsed()) {
        const AcceptanceReport rep = run_report(cfg, tab);
        print_report(std::cout, rep);
        write_report_csv(cfg.out_dir / "report.csv", rep);
        return rep.all_pass() ? 0 : 1;
    }
    if (evifpp_cmd->parsed()) {
        const auto pat = load_pattern_file(pattern_path, tab);
        const Evidence ev = evifpp(tab, pat, lb);
        std::cout << "nodes: " << pat.node_count() << "\n";
        std::cout << "occurred: " << (ev.occurred ? "yes" : "no") << "\n";
        std::cout << "evifpp: " << ev.value << " (base " << log_base_name(ev.base) << ")\n";
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
