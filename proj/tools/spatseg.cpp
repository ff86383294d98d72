// spatseg: command-line front end for the spatial local-dependence toolkit.
//
// Subcommands:
//   simulate        draw a synthetic dataset from a covariance scenario
//   indices         compute local dependence indices for an x,y,z CSV
//   visualize       fused-index cell maps (SVG) along a penalty path
//   test            Monte-Carlo stationarity test (JSON report)
//   segment         BIC-selected Voronoi segmentation
//   krige           stationary or piecewise kriging with prediction scores
//   fetch-colorado  cached precipitation dataset download + preprocessing
//   bench           wall-clock micro-benchmarks of the core operations
//
// Every subcommand accepts --config FILE (a JSON object with "schema": 1
// whose keys are the subcommand's long option names); explicit command-line
// flags override config values. Exit codes: 0 success, 2 usage, 3 data,
// 4 numerical failure, 1 anything else.

#include <CLI11.hpp>
#include <json.hpp>

#include <spatseg/colorado.hpp>
#include <spatseg/covariance.hpp>
#include <spatseg/errors.hpp>
#include <spatseg/fused_lasso.hpp>
#include <spatseg/geometry.hpp>
#include <spatseg/indices.hpp>
#include <spatseg/io.hpp>
#include <spatseg/kriging.hpp>
#include <spatseg/metrics.hpp>
#include <spatseg/segmentation.hpp>
#include <spatseg/simulate.hpp>
#include <spatseg/stat_test.hpp>
#include <spatseg/svg.hpp>
#include <spatseg/types.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spatseg;

namespace {

// Usage-level failure raised before or outside CLI11 parsing (config file
// problems, malformed compound flags). Maps to exit code 2.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// small parsing helpers

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.back())) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && issp(s[b])) ++b;
    return s.substr(b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::optional<double> parse_double(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + s.size()) return std::nullopt;
    return v;
}

std::vector<double> parse_double_list(const std::string& s, std::size_t want, const char* what) {
    const auto parts = split(s, ',');
    if (parts.size() != want)
        throw usage_error(std::string(what) + ": expected " + std::to_string(want) +
                          " comma-separated numbers, got '" + s + "'");
    std::vector<double> out;
    for (const auto& p : parts) {
        const auto v = parse_double(p);
        if (!v) throw usage_error(std::string(what) + ": cannot parse '" + p + "' as a number");
        out.push_back(*v);
    }
    return out;
}

Rect parse_domain(const std::string& s) {
    const auto v = parse_double_list(s, 4, "--domain");
    const Rect r{v[0], v[1], v[2], v[3]};
    if (!(r.xmax > r.xmin) || !(r.ymax > r.ymin))
        throw usage_error("--domain: need xmin < xmax and ymin < ymax");
    return r;
}

// Either a fixed nugget variance or a request to estimate it from the data.
struct Tau2Spec {
    bool estimate = true;
    double value = 0.0;
};

Tau2Spec parse_tau2(const std::string& s) {
    if (lower(trim(s)) == "estimate") return {};
    const auto v = parse_double(s);
    if (!v || *v < 0.0)
        throw usage_error("--tau2: expected 'estimate' or a nonnegative number, got '" + s + "'");
    return {false, *v};
}

std::pair<int, int> parse_grid(const std::string& s) {
    const auto xpos = s.find_first_of("xX");
    if (xpos == std::string::npos)
        throw usage_error("--grid: expected NXxNY (e.g. 40x30), got '" + s + "'");
    int nx = 0, ny = 0;
    try {
        nx = std::stoi(s.substr(0, xpos));
        ny = std::stoi(s.substr(xpos + 1));
    } catch (const std::exception&) {
        throw usage_error("--grid: cannot parse '" + s + "'");
    }
    if (nx < 1 || ny < 1) throw usage_error("--grid: grid sides must be positive");
    return {nx, ny};
}

// ---------------------------------------------------------------------------
// dataset loading

void report_rejects(const std::vector<std::size_t>& rejected, const fs::path& path) {
    if (rejected.empty()) return;
    std::string lines;
    const std::size_t shown = std::min<std::size_t>(rejected.size(), 12);
    for (std::size_t i = 0; i < shown; ++i)
        lines += (i ? ", " : "") + std::to_string(rejected[i]);
    if (shown < rejected.size()) lines += ", ...";
    std::cerr << "note: " << path.string() << ": dropped " << rejected.size()
              << " row(s) with missing or non-finite values (lines " << lines << ")\n";
}

SpatialDataset load_dataset(const fs::path& path, std::optional<double> known_tau2) {
    XyzCsv csv = read_xyz_csv(path);
    report_rejects(csv.rejected_lines, path);
    try {
        return SpatialDataset(SiteSet(std::move(csv.pts)), std::move(csv.z), known_tau2);
    } catch (const std::invalid_argument& e) {
        throw data_error(path.string() + ": " + e.what());
    }
}

// Prediction locations: header must name x and y; a z column, when present,
// enables scoring. Shares the row-rejection conventions of the x,y,z reader.
struct XyCsv {
    std::vector<Point> pts;
    std::optional<Eigen::VectorXd> z;
    std::vector<std::size_t> rejected_lines;
};

XyCsv read_xy_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error(path.string() + ": cannot open file");
    std::string line;
    if (!std::getline(in, line)) throw data_error(path.string() + ": empty file (header required)");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    int cx = -1, cy = -1, cz = -1;
    {
        const auto cols = split(line, ',');
        for (int i = 0; i < static_cast<int>(cols.size()); ++i) {
            const std::string name = lower(trim(cols[static_cast<std::size_t>(i)]));
            if (name == "x" && cx < 0) cx = i;
            if (name == "y" && cy < 0) cy = i;
            if (name == "z" && cz < 0) cz = i;
        }
        if (cx < 0 || cy < 0)
            throw data_error(path.string() + ": header must name columns x and y (line 1)");
    }
    XyCsv out;
    std::vector<double> zs;
    const auto missing = [](const std::string& f) {
        const std::string t = lower(trim(f));
        return t.empty() || t == "na" || t == "nan";
    };
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        const int need = std::max(std::max(cx, cy), cz < 0 ? -1 : cz);
        if (static_cast<int>(fields.size()) <= need)
            throw data_error(path.string() + ": too few fields on line " + std::to_string(lineno));
        const std::string& fx = fields[static_cast<std::size_t>(cx)];
        const std::string& fy = fields[static_cast<std::size_t>(cy)];
        const std::string fz = cz < 0 ? std::string("0") : fields[static_cast<std::size_t>(cz)];
        if (missing(fx) || missing(fy) || (cz >= 0 && missing(fz))) {
            out.rejected_lines.push_back(lineno);
            continue;
        }
        const auto x = parse_double(fx), y = parse_double(fy), zv = parse_double(fz);
        if (!x || !y || !zv)
            throw data_error(path.string() + ": unparseable number on line " + std::to_string(lineno));
        if (!std::isfinite(*x) || !std::isfinite(*y) || !std::isfinite(*zv)) {
            out.rejected_lines.push_back(lineno);
            continue;
        }
        out.pts.push_back({*x, *y});
        zs.push_back(*zv);
    }
    if (cz >= 0) {
        Eigen::VectorXd z(static_cast<Eigen::Index>(zs.size()));
        for (std::size_t i = 0; i < zs.size(); ++i) z[static_cast<Eigen::Index>(i)] = zs[i];
        out.z = std::move(z);
    }
    report_rejects(out.rejected_lines, path);
    return out;
}

// ---------------------------------------------------------------------------
// shared pipeline steps

struct ResolvedTau2 {
    double value = 0.0;
    bool estimated = false;
};

ResolvedTau2 resolve_tau2(const SpatialDataset& data, const Tau2Spec& spec, std::size_t pairs) {
    if (!spec.estimate) return {spec.value, false};
    return {estimate_nugget(data, pairs).tau2, true};
}

struct IndexPipeline {
    double radius = 0.0;
    ResolvedTau2 tau2;
    NeighborGraph graph;
    LocalIndexField field;
    std::vector<Point> active_pts;
};

IndexPipeline run_index_pipeline(const SpatialDataset& data, double radius, const Tau2Spec& tau2_spec,
                                 std::size_t nugget_pairs, bool literal_eq7) {
    IndexPipeline p;
    p.radius = radius > 0.0 ? radius : recommended_radius(data.sites.domain().area(), data.sites.size());
    p.tau2 = resolve_tau2(data, tau2_spec, nugget_pairs);
    p.graph = build_neighbor_graph(data.sites, p.radius);
    p.field = local_indices(data, p.graph, index_constants(p.tau2.value), literal_eq7);
    p.active_pts.reserve(p.field.active.size());
    for (int i : p.field.active) p.active_pts.push_back(data.sites[static_cast<std::size_t>(i)]);
    return p;
}

void emit_json(const json& j, const std::string& out) {
    if (out == "-" || out.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(out);
    if (!f) throw data_error(out + ": cannot open for writing");
    f << j.dump(2) << '\n';
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw data_error(path.string() + ": cannot open for writing");
    f << content;
}

std::string format_rho(double rho) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", rho);
    return buf;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string out;
    std::string labels_out;
    std::string scenario = "stationary";
    std::string design = "uniform";
    std::string domain = "0,0,1,1";
    std::size_t n = 100;
    double tau2 = 0.0;
    double sigma2 = 1.0;
    double alpha = 1.0;
    double nu = 0.5;
    double lambda = 20.0;
    std::string alphas = "1,0.33333333333333331,0.5,0.66666666666666663";
    double alpha1 = 0.1;
    double alpha2 = 0.5;
    double blend_a = 0.01;
    std::uint64_t seed = 1;
};

int run_simulate(const SimulateArgs& a) {
    Scenario sc;
    sc.domain = parse_domain(a.domain);
    sc.n = a.n;
    sc.tau2 = a.tau2;
    sc.seed = a.seed;
    if (a.design == "uniform") {
        sc.design = Design::uniform;
    } else if (a.design == "clustered") {
        sc.design = Design::clustered;
    } else {
        throw usage_error("--design: expected uniform or clustered, got '" + a.design + "'");
    }
    if (a.scenario == "stationary") {
        sc.family = StationaryScenario{MaternParams{a.sigma2, a.alpha, a.nu}};
    } else if (a.scenario == "nonstat") {
        sc.family = NonstatScenario{a.lambda};
    } else if (a.scenario == "fourblock") {
        const auto v = parse_double_list(a.alphas, 4, "--alphas");
        FourBlockScenario fb;
        fb.alpha = {v[0], v[1], v[2], v[3]};
        fb.sigma2 = a.sigma2;
        fb.nu = a.nu;
        sc.family = fb;
    } else if (a.scenario == "blended") {
        BlendedScenario b;
        b.params = make_blended_params(sc.domain, a.alpha1, a.alpha2, a.blend_a);
        sc.family = b;
    } else {
        throw usage_error("--scenario: expected stationary, nonstat, fourblock or blended, got '" +
                          a.scenario + "'");
    }

    const SpatialDataset data = simulate_dataset(sc);
    write_xyz_csv(a.out, data.sites.points(), data.z);
    if (!a.labels_out.empty()) {
        const auto labels = true_region_labels(sc, data.sites);
        std::ofstream f(a.labels_out);
        if (!f) throw data_error(a.labels_out + ": cannot open for writing");
        f << "x,y,region\n";
        for (std::size_t i = 0; i < data.sites.size(); ++i)
            f << format_double(data.sites[i].x) << ',' << format_double(data.sites[i].y) << ','
              << labels[i] << '\n';
    }
    std::cerr << "wrote " << data.sites.size() << " sites (" << a.scenario << ", seed " << a.seed
              << ") to " << a.out << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// indices

struct IndicesArgs {
    std::string in;
    std::string out;
    double radius = 0.0;
    std::string tau2 = "estimate";
    std::size_t nugget_pairs = 250;
    bool literal_eq7 = false;
    bool emit_summary = false;
    std::uint64_t seed = 1; // reserved; the pipeline is deterministic
};

int run_indices(const IndicesArgs& a) {
    const SpatialDataset data = load_dataset(a.in, std::nullopt);
    const auto p = run_index_pipeline(data, a.radius, parse_tau2(a.tau2), a.nugget_pairs, a.literal_eq7);

    std::ofstream f(a.out);
    if (!f) throw data_error(a.out + ": cannot open for writing");
    f << "x,y,xi,n_neighbors\n";
    for (std::size_t i = 0; i < p.active_pts.size(); ++i)
        f << format_double(p.active_pts[i].x) << ',' << format_double(p.active_pts[i].y) << ','
          << format_double(p.field.xi[static_cast<Eigen::Index>(i)]) << ','
          << p.field.n_neighbors[i] << '\n';

    std::cerr << "indices: " << p.active_pts.size() << " active of " << data.sites.size()
              << " sites, radius " << p.radius << ", tau2 " << p.tau2.value
              << (p.tau2.estimated ? " (estimated)" : " (fixed)") << " -> " << a.out << '\n';
    if (a.emit_summary) {
        json j{{"schema", 1},
               {"command", "indices"},
               {"n", data.sites.size()},
               {"n_active", p.active_pts.size()},
               {"radius", p.radius},
               {"tau2", p.tau2.value},
               {"tau2_estimated", p.tau2.estimated},
               {"constants", {{"C1", p.field.consts.C1}, {"C2", p.field.consts.C2}, {"C3", p.field.consts.C3}}},
               {"xi_mean", p.field.xi.size() ? p.field.xi.mean() : 0.0},
               {"out", a.out}};
        emit_json(j, "-");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// visualize

struct VisualizeArgs {
    std::string in;
    std::string out_dir = ".";
    std::vector<double> rho{0.25, 0.5, 1.0, 2.0};
    double radius = 0.0;
    std::string tau2 = "estimate";
    std::size_t nugget_pairs = 250;
    bool literal_eq7 = false;
    double fuse_tol = 1e-6;
    double width = 720.0;
    std::uint64_t seed = 1; // reserved; the path solve is deterministic
};

int run_visualize(const VisualizeArgs& a) {
    const SpatialDataset data = load_dataset(a.in, std::nullopt);
    const auto p = run_index_pipeline(data, a.radius, parse_tau2(a.tau2), a.nugget_pairs, a.literal_eq7);
    if (p.active_pts.size() < 3)
        throw data_error("visualize: need at least 3 active sites, have " +
                         std::to_string(p.active_pts.size()));

    const SiteSet active_set(p.active_pts, data.sites.domain());
    const VoronoiDiagram vd = voronoi_diagram(active_set);
    fs::create_directories(a.out_dir);

    json files = json::array();
    SvgOptions svg_opts;
    svg_opts.width = a.width;
    svg_opts.title = "local dependence index";
    const fs::path xi_path = fs::path(a.out_dir) / "xi_map.svg";
    write_text_file(xi_path, voronoi_svg(vd, data.sites.domain(), p.field.xi, p.active_pts, svg_opts));
    files.push_back({{"file", xi_path.string()}, {"kind", "xi"}});

    std::vector<double> rhos = a.rho;
    std::sort(rhos.begin(), rhos.end());
    rhos.erase(std::unique(rhos.begin(), rhos.end()), rhos.end());

    FusionResult warm;
    bool have_warm = false;
    for (double rho : rhos) {
        const FusionProblem prob{p.field.xi, vd.edges, rho};
        const FusionResult res = fused_lasso(prob, {}, have_warm ? &warm : nullptr);
        const auto [component, n_components] = fused_components(res.beta, vd.edges, a.fuse_tol);
        SvgOptions o = svg_opts;
        o.title = "fused index map, rho = " + format_rho(rho) + " (" +
                  std::to_string(n_components) + " components)";
        const fs::path out = fs::path(a.out_dir) / ("beta_rho" + format_rho(rho) + ".svg");
        write_text_file(out, voronoi_svg(vd, data.sites.domain(), res.beta, p.active_pts, o));
        files.push_back({{"file", out.string()},
                         {"kind", "beta"},
                         {"rho", rho},
                         {"components", n_components},
                         {"iterations", res.iterations}});
        warm = res;
        have_warm = true;
    }

    json j{{"schema", 1},
           {"command", "visualize"},
           {"n_active", p.active_pts.size()},
           {"radius", p.radius},
           {"tau2", p.tau2.value},
           {"tau2_estimated", p.tau2.estimated},
           {"files", files}};
    emit_json(j, "-");
    return 0;
}

// ---------------------------------------------------------------------------
// test

struct TestArgs {
    std::string in;
    std::string out = "-";
    int M = 99;
    double level = 0.05;
    double radius = 0.0;
    std::string tau2 = "estimate";
    std::size_t nugget_pairs = 250;
    bool literal_eq7 = false;
    std::uint64_t seed = 1;
};

int run_test(const TestArgs& a) {
    const Tau2Spec spec = parse_tau2(a.tau2);
    const SpatialDataset data =
        load_dataset(a.in, spec.estimate ? std::nullopt : std::optional<double>(spec.value));
    PipelineConfig cfg;
    cfg.radius = a.radius;
    cfg.nugget_pairs = a.nugget_pairs;
    cfg.literal_normalization = a.literal_eq7;

    TestReport rep = stationarity_test(data, a.M, a.seed, cfg);
    rep.level = a.level;
    rep.stationary = rep.p_value >= a.level;

    json j{{"schema", 1},
           {"command", "test"},
           {"n", data.sites.size()},
           {"n_active", rep.active_sites.size()},
           {"M", rep.M},
           {"seed", a.seed},
           {"radius", rep.radius},
           {"tau2", rep.tau2},
           {"tau2_estimated", rep.tau2_estimated},
           {"T", rep.T},
           {"p_value", rep.p_value},
           {"level", rep.level},
           {"stationary", rep.stationary},
           {"recommendation",
            rep.stationary ? "stationary model (p >= level)" : "segment the domain (p < level)"},
           {"fit",
            {{"family", "matern"},
             {"alpha", rep.fit.alpha},
             {"nu", rep.fit.nu},
             {"sigma2", rep.fit.sigma2},
             {"profile_objective", rep.fit.profile_objective},
             {"nll", rep.fit.nll},
             {"evals", rep.fit.evals}}},
           {"groups",
            json::array({{{"n", rep.group1.n}, {"mean", rep.group1.mean}, {"var", rep.group1.var}},
                         {{"n", rep.group2.n}, {"mean", rep.group2.mean}, {"var", rep.group2.var}}})},
           {"seeds", rep.seeds},
           {"null_T", rep.null_T}};
    emit_json(j, a.out);
    return 0;
}

// ---------------------------------------------------------------------------
// segment

struct SegmentArgs {
    std::string in;
    int kmax = 4;
    double radius = 0.0;
    std::string tau2 = "estimate";
    std::size_t nugget_pairs = 250;
    bool literal_eq7 = false;
    int min_count = 3;
    std::string labels_out;
    std::string svg_out;
    bool emit_json_report = false;
    std::uint64_t seed = 1; // reserved; the search is deterministic
};

int run_segment(const SegmentArgs& a) {
    const SpatialDataset data = load_dataset(a.in, std::nullopt);
    const auto p = run_index_pipeline(data, a.radius, parse_tau2(a.tau2), a.nugget_pairs, a.literal_eq7);
    SegmentationOptions opts;
    opts.min_count = a.min_count;
    const BicSelection sel = select_K_by_bic(p.active_pts, p.field.xi, a.kmax, opts);

    if (a.emit_json_report) {
        json entries = json::array();
        for (const auto& e : sel.entries)
            entries.push_back({{"K", e.K},
                               {"objective", e.objective},
                               {"bic", e.bic},
                               {"seeds", e.seg.seeds},
                               {"cycles", e.seg.cycles}});
        json j{{"schema", 1},
               {"command", "segment"},
               {"n", data.sites.size()},
               {"n_active", p.active_pts.size()},
               {"radius", p.radius},
               {"tau2", p.tau2.value},
               {"tau2_estimated", p.tau2.estimated},
               {"best_K", sel.best_K},
               {"entries", entries}};
        emit_json(j, "-");
    } else {
        std::printf("  K          f_K          BIC\n");
        for (const auto& e : sel.entries)
            std::printf("%3d %12.4f %12.4f%s\n", e.K, e.objective, e.bic,
                        e.K == sel.best_K ? "  *" : "");
        std::printf("best K: %d   (active sites: %zu of %zu)\n", sel.best_K, p.active_pts.size(),
                    data.sites.size());
    }

    const auto& best = sel.entries[static_cast<std::size_t>(sel.best_K - 1)];
    if (!a.labels_out.empty()) {
        std::ofstream f(a.labels_out);
        if (!f) throw data_error(a.labels_out + ": cannot open for writing");
        f << "x,y,label\n";
        for (std::size_t i = 0; i < p.active_pts.size(); ++i)
            f << format_double(p.active_pts[i].x) << ',' << format_double(p.active_pts[i].y) << ','
              << best.seg.label[i] << '\n';
    }
    if (!a.svg_out.empty()) {
        const SiteSet active_set(p.active_pts, data.sites.domain());
        const VoronoiDiagram vd = voronoi_diagram(active_set);
        Eigen::VectorXd vals(static_cast<Eigen::Index>(best.seg.label.size()));
        for (std::size_t i = 0; i < best.seg.label.size(); ++i)
            vals[static_cast<Eigen::Index>(i)] = best.seg.label[i];
        SvgOptions o;
        o.title = "segmentation, K = " + std::to_string(sel.best_K);
        write_text_file(a.svg_out, voronoi_svg(vd, data.sites.domain(), vals, p.active_pts, o));
    }
    return 0;
}

// ---------------------------------------------------------------------------
// krige

struct KrigeArgs {
    std::string train;
    std::string predict;
    std::string grid;
    std::string out;
    int K = 0; // 0 = select by BIC
    int kmax = 4;
    double radius = 0.0;
    std::string tau2 = "estimate";
    std::size_t nugget_pairs = 250;
    bool literal_eq7 = false;
    int min_count = 3;
    std::uint64_t seed = 1; // reserved; kriging is deterministic
};

int run_krige(const KrigeArgs& a) {
    if (a.predict.empty() == a.grid.empty())
        throw usage_error("krige: exactly one of --predict and --grid is required");
    const SpatialDataset train = load_dataset(a.train, std::nullopt);
    const ResolvedTau2 tau2 = resolve_tau2(train, parse_tau2(a.tau2), a.nugget_pairs);

    std::vector<Point> query;
    std::optional<Eigen::VectorXd> truth;
    if (!a.predict.empty()) {
        XyCsv q = read_xy_csv(a.predict);
        query = std::move(q.pts);
        truth = std::move(q.z);
    } else {
        const auto [nx, ny] = parse_grid(a.grid);
        const Rect d = train.sites.domain();
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix)
                query.push_back({d.xmin + (ix + 0.5) * d.width() / nx,
                                 d.ymin + (iy + 0.5) * d.height() / ny});
    }
    if (query.empty()) throw data_error("krige: no prediction locations");

    int K_used = a.K;
    json fit_report = json::array();
    std::vector<PredictionRow> rows;
    rows.reserve(query.size());
    const auto push_row = [&](Point s, const Prediction& p, int region) {
        rows.push_back({s, p.mean, std::sqrt(std::max(0.0, p.variance) + tau2.value), region});
    };

    if (a.K == 0 || a.K >= 2) {
        const auto p = run_index_pipeline(train, a.radius, Tau2Spec{false, tau2.value},
                                          a.nugget_pairs, a.literal_eq7);
        SegmentationOptions opts;
        opts.min_count = a.min_count;
        std::vector<Point> seeds;
        if (a.K == 0) {
            const BicSelection sel = select_K_by_bic(p.active_pts, p.field.xi, a.kmax, opts);
            K_used = sel.best_K;
            for (int s : sel.entries[static_cast<std::size_t>(sel.best_K - 1)].seg.seeds)
                seeds.push_back(p.active_pts[static_cast<std::size_t>(s)]);
        } else {
            const Segmentation seg = segment_greedy(p.active_pts, p.field.xi, a.K, opts);
            K_used = a.K;
            for (int s : seg.seeds) seeds.push_back(p.active_pts[static_cast<std::size_t>(s)]);
        }
        if (K_used >= 2) {
            const auto fits = fit_piecewise_exponential(train, seeds, tau2.value);
            const PiecewiseKriging pw = piecewise_krige(train, seeds, fits);
            for (std::size_t k = 0; k < fits.size(); ++k)
                fit_report.push_back(
                    {{"region", k}, {"alpha", fits[k].alpha}, {"sigma2", fits[k].sigma2}});
            for (const Point s : query) {
                const Prediction pr = pw.predict(s);
                push_row(s, pr, pr.region);
            }
        }
    }
    if (K_used == 1) {
        FitOptions fo;
        fo.fix_nu = true;
        fo.fixed_nu = 0.5;
        const MaternFit fit = fit_matern_ml(train, tau2.value, fo);
        fit_report.push_back({{"region", 0}, {"n", train.sites.size()}, {"alpha", fit.alpha}, {"sigma2", fit.sigma2}});
        const KrigingSystem sys(train.sites, train.z,
                                CovarianceModel(ExponentialParams{fit.sigma2, fit.alpha}, tau2.value));
        rows.clear();
        for (const Point s : query) push_row(s, sys.predict(s), 0);
    }

    write_predictions_csv(a.out, rows);

    json j{{"schema", 1},
           {"command", "krige"},
           {"n_train", train.sites.size()},
           {"n_predict", rows.size()},
           {"K", K_used},
           {"tau2", tau2.value},
           {"tau2_estimated", tau2.estimated},
           {"fits", fit_report},
           {"out", a.out}};
    if (truth) {
        std::vector<double> pred(rows.size()), obs(rows.size());
        double crps = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            pred[i] = rows[i].mean;
            obs[i] = (*truth)[static_cast<Eigen::Index>(i)];
            crps += gaussian_crps(rows[i].mean, rows[i].sd, obs[i]);
        }
        j["rmspe"] = rmspe(pred, obs);
        j["mean_crps"] = crps / static_cast<double>(rows.size());
    }
    emit_json(j, "-");
    return 0;
}

// ---------------------------------------------------------------------------
// fetch-colorado

struct FetchArgs {
    std::string cache_dir = "cache";
    std::string base_url;
    std::string loc_file;
    std::string ppt_file;
    bool offline = false;
    int year = 1992;
    std::size_t expected_stations = 254;
    std::string out;
    std::uint64_t seed = 1; // reserved; fetching is deterministic
};

int run_fetch(const FetchArgs& a) {
    ColoradoOptions o;
    o.cache_dir = a.cache_dir;
    if (!a.base_url.empty()) o.base_url = a.base_url;
    if (!a.loc_file.empty()) o.loc_file = a.loc_file;
    if (!a.ppt_file.empty()) o.ppt_file = a.ppt_file;
    o.offline = a.offline;
    o.year = a.year;
    o.expected_stations = a.expected_stations;

    const SpatialDataset data = fetch_colorado(o);
    std::ostringstream csv;
    write_xyz_csv(csv, data.sites.points(), data.z);
    const std::string canonical = csv.str();
    if (!a.out.empty()) write_text_file(a.out, canonical);

    const Rect d = data.sites.domain();
    json j{{"schema", 1},
           {"command", "fetch-colorado"},
           {"stations", data.sites.size()},
           {"year", o.year},
           {"cache_dir", o.cache_dir.string()},
           {"checksum_sha256", sha256_hex(canonical)},
           {"domain", {{"xmin", d.xmin}, {"ymin", d.ymin}, {"xmax", d.xmax}, {"ymax", d.ymax}}}};
    if (!a.out.empty()) j["out"] = a.out;
    emit_json(j, "-");
    return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
    std::size_t n = 400;
    int reps = 3;
    bool emit_json_report = false;
    std::uint64_t seed = 1;
};

int run_bench(const BenchArgs& a) {
    Scenario sc;
    sc.n = a.n;
    sc.seed = a.seed;
    sc.family = StationaryScenario{MaternParams{1.0, 0.2, 0.5}};
    sc.tau2 = 0.01;
    const SpatialDataset data = simulate_dataset(sc);
    const double radius = recommended_radius(data.sites.domain().area(), data.sites.size());
    const NeighborGraph graph = build_neighbor_graph(data.sites, radius);
    const LocalIndexField field = local_indices(data, graph, index_constants(0.01));
    std::vector<Point> active_pts;
    for (int i : field.active) active_pts.push_back(data.sites[static_cast<std::size_t>(i)]);

    // 24 x 24 lattice problem for the fused-lasso timing.
    const int side = 24;
    std::vector<std::pair<int, int>> grid_edges;
    Eigen::VectorXd grid_xi(side * side);
    {
        std::mt19937_64 eng(a.seed);
        std::normal_distribution<double> nd;
        for (int r = 0; r < side; ++r)
            for (int c = 0; c < side; ++c) {
                const int i = r * side + c;
                grid_xi[i] = nd(eng) + (c >= side / 2 ? 2.0 : 0.0);
                if (c + 1 < side) grid_edges.push_back({i, i + 1});
                if (r + 1 < side) grid_edges.push_back({i, i + side});
            }
    }

    const CovarianceModel model(ExponentialParams{1.0, 0.2}, 0.01);
    const MaternParams mp{1.0, 0.2, 1.3};

    struct Item {
        std::string name;
        std::function<void()> fn;
    };
    volatile double sink = 0.0;
    const std::vector<Item> items = {
        {"matern_cov_100k_evals",
         [&] {
             double s = 0.0;
             for (int i = 1; i <= 100000; ++i) s += matern_cov(1e-3 * i, mp);
             sink = s;
         }},
        {"cov_build_plus_cholesky",
         [&] {
             auto m = build_cov_matrix(data.sites.points(), model);
             sink = jittered_llt(std::move(m)).llt.matrixL()(0, 0);
         }},
        {"neighbor_graph", [&] { sink = static_cast<double>(build_neighbor_graph(data.sites, radius).active.size()); }},
        {"local_indices",
         [&] { sink = local_indices(data, graph, index_constants(0.01)).xi.sum(); }},
        {"fused_lasso_24x24_grid",
         [&] {
             AdmmOptions ao;
             ao.tol = 1e-6;
             sink = fused_lasso({grid_xi, grid_edges, 1.0}, ao).beta.sum();
         }},
        {"greedy_segmentation_K4",
         [&] { sink = segment_greedy(active_pts, field.xi, 4).objective; }},
        {"kriging_fit_factor_predict_256",
         [&] {
             const KrigingSystem sys(data.sites, data.z, model);
             double s = 0.0;
             for (int iy = 0; iy < 16; ++iy)
                 for (int ix = 0; ix < 16; ++ix)
                     s += sys.predict({(ix + 0.5) / 16.0, (iy + 0.5) / 16.0}).mean;
             sink = s;
         }},
    };
    (void)sink;

    json results = json::array();
    for (const auto& item : items) {
        std::vector<double> ms;
        for (int r = 0; r < std::max(1, a.reps); ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            item.fn();
            const auto t1 = std::chrono::steady_clock::now();
            ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        }
        std::sort(ms.begin(), ms.end());
        const double med = ms[ms.size() / 2];
        results.push_back({{"name", item.name}, {"median_ms", med}, {"reps", a.reps}});
        if (!a.emit_json_report) std::printf("%-32s %10.3f ms\n", item.name.c_str(), med);
    }
    if (a.emit_json_report)
        emit_json(json{{"schema", 1}, {"command", "bench"}, {"n", a.n}, {"results", results}}, "-");
    return 0;
}

// ---------------------------------------------------------------------------
// config-file preprocessing

std::string json_scalar_to_token(const std::string& key, const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number_float()) return format_double(v.get<double>());
    throw usage_error("config: unsupported value type for key '" + key + "'");
}

// Loads --config FILE (if present among the subcommand's tokens), validates
// it against the subcommand's option names, and injects the derived
// "--key=value" tokens right after the subcommand so later command-line
// flags take precedence under the take-last policy.
void inject_config(const CLI::App& app, std::vector<std::string>& args) {
    if (args.empty()) return;
    const CLI::App* sub = nullptr;
    for (const CLI::App* s : app.get_subcommands([](const CLI::App*) { return true; }))
        if (s->get_name() == args.front()) sub = s;
    if (sub == nullptr) return;

    std::string cfg_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            cfg_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            cfg_path = args[i].substr(9);
    }
    if (cfg_path.empty()) return;

    std::ifstream f(cfg_path);
    if (!f) throw usage_error("config: cannot open '" + cfg_path + "'");
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::parse_error& e) {
        throw usage_error("config: " + cfg_path + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw usage_error("config: top level must be a JSON object");
    if (!doc.contains("schema") || !doc["schema"].is_number_integer() ||
        doc["schema"].get<int>() != 1)
        throw usage_error("config: required key \"schema\" must equal 1");

    std::set<std::string> known;
    for (const CLI::Option* o : sub->get_options())
        for (const std::string& ln : o->get_lnames()) known.insert(ln);

    std::vector<std::string> tokens;
    for (const auto& [key, value] : doc.items()) {
        if (key == "schema") continue;
        if (key == "config" || known.find(key) == known.end())
            throw usage_error("config: unknown key '" + key + "' for subcommand '" +
                              sub->get_name() + "'");
        if (value.is_boolean()) {
            if (value.get<bool>()) tokens.push_back("--" + key);
            continue;
        }
        if (value.is_array()) {
            std::string joined;
            for (const auto& el : value)
                joined += (joined.empty() ? "" : ",") + json_scalar_to_token(key, el);
            tokens.push_back("--" + key + "=" + joined);
            continue;
        }
        tokens.push_back("--" + key + "=" + json_scalar_to_token(key, value));
    }
    args.insert(args.begin() + 1, tokens.begin(), tokens.end());
}

// ---------------------------------------------------------------------------

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);

    CLI::App app{"Local spatial-dependence indices, stationarity testing, Voronoi segmentation\n"
                 "and piecewise kriging for a single realization of irregular spatial data.",
                 "spatseg"};
    app.set_version_flag("--version", "spatseg 1.0.0");
    app.require_subcommand(1);

    int rc = 0;

    std::string cfg_sim, cfg_idx, cfg_vis, cfg_test, cfg_seg, cfg_krige, cfg_fetch, cfg_bench;

    // simulate -------------------------------------------------------------
    SimulateArgs sim;
    auto* s_sim = app.add_subcommand("simulate", "Draw a synthetic dataset from a covariance scenario");
    s_sim->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    s_sim->add_option("--config", cfg_sim, "JSON config file (object with \"schema\": 1)");
    s_sim->add_option("--seed", sim.seed, "random seed");
    s_sim->add_option("--out", sim.out, "output CSV path (x,y,z)")->required();
    s_sim->add_option("--labels-out", sim.labels_out, "optional CSV of true region labels");
    s_sim->add_option("--scenario", sim.scenario, "stationary | nonstat | fourblock | blended");
    s_sim->add_option("--design", sim.design, "uniform | clustered");
    s_sim->add_option("--domain", sim.domain, "domain rectangle xmin,ymin,xmax,ymax");
    s_sim->add_option("--n", sim.n, "number of sites")->check(CLI::PositiveNumber);
    s_sim->add_option("--tau2", sim.tau2, "nugget variance")->check(CLI::NonNegativeNumber);
    s_sim->add_option("--sigma2", sim.sigma2, "marginal variance (stationary / fourblock)");
    s_sim->add_option("--alpha", sim.alpha, "range (stationary)")->check(CLI::PositiveNumber);
    s_sim->add_option("--nu", sim.nu, "smoothness (stationary / fourblock)")->check(CLI::PositiveNumber);
    s_sim->add_option("--lambda", sim.lambda, "nonstationarity rate (nonstat)")->check(CLI::PositiveNumber);
    s_sim->add_option("--alphas", sim.alphas, "four block ranges a,b,c,d (fourblock)");
    s_sim->add_option("--alpha1", sim.alpha1, "left-region range (blended)")->check(CLI::PositiveNumber);
    s_sim->add_option("--alpha2", sim.alpha2, "right-region range (blended)")->check(CLI::PositiveNumber);
    s_sim->add_option("--blend-a", sim.blend_a, "blend decay rate a (blended)")->check(CLI::PositiveNumber);
    s_sim->callback([&] { rc = run_simulate(sim); });

    // indices ----------------------------------------------------------------
    IndicesArgs idx;
    auto* s_idx = app.add_subcommand("indices", "Compute local dependence indices from an x,y,z CSV");
    s_idx->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    s_idx->add_option("--config", cfg_idx, "JSON config file");
    s_idx->add_option("--seed", idx.seed, "reserved (pipeline is deterministic)");
    s_idx->add_option("--in", idx.in, "input CSV (x,y,z)")->required();
    s_idx->add_option("--out", idx.out, "output CSV (x,y,xi,n_neighbors)")->required();
    s_idx->add_option("--radius", idx.radius, "neighborhood radius (0 = recommended)");
    s_idx->add_option("--tau2", idx.tau2, "'estimate' or a fixed nugget variance");
    s_idx->add_option("--nugget-pairs", idx.nugget_pairs, "pairs per lag class for the nugget estimate");
    s_idx->add_flag("--literal-eq7", idx.literal_eq7, "use the |N_i|-normalized printed form");
    s_idx->add_flag("--json", idx.emit_summary, "print a JSON summary to stdout");
    s_idx->callback([&] { rc = run_indices(idx); });

    // visualize --------------------------------------------------------------
    VisualizeArgs vis;
    auto* s_vis = app.add_subcommand("visualize", "Fused-index SVG maps along a penalty path");
    s_vis->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    s_vis->add_option("--config", cfg_vis, "JSON config file");
    s_vis->add_option("--seed", vis.seed, "reserved (solve is deterministic)");
    s_vis->add_option("--in", vis.in, "input CSV (x,y,z)")->required();
    s_vis->add_option("--out-dir", vis.out_dir, "output directory for SVG files");
    s_vis->add_option("--rho", vis.rho, "penalty values (comma separated)")
        ->delimiter(',')
        ->check(CLI::NonNegativeNumber);
    s_vis->add_option("--radius", vis.radius, "neighborhood radius (0 = recommended)");
    s_vis->add_option("--tau2", vis.tau2, "'estimate' or a fixed nugget variance");
    s_vis->add_option("--nugget-pairs", vis.nugget_pairs, "pairs per lag class for the nugget estimate");
    s_vis->add_flag("--literal-eq7", vis.literal_eq7, "use the |N_i|-normalized printed form");
    s_vis->add_option("--fuse-tol", vis.fuse_tol, "|beta_j - beta_k| threshold for fusing cells");
    s_vis->add_option("--width", vis.width, "SVG width in pixels")->check(CLI::PositiveNumber);
    s_vis->callback([&] { rc = run_visualize(vis); });

    // test ---------------------------------------------------------------------
    TestArgs tst;
    auto* s_test = app.add_subcommand("test", "Monte-Carlo stationarity test (JSON report)");
    s_test->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    s_test->add_option("--config", cfg_test, "JSON config file");
    s_test->add_option("--seed", tst.seed, "random seed of the Monte-Carlo null");
    s_test->add_option("--in", tst.in, "input CSV (x,y,z)")->required();
    s_test->add_option("--out", tst.out, "JSON report path ('-' = stdout)");
    s_test->add_option("--M", tst.M, "Monte-Carlo null sample size")->check(CLI::PositiveNumber);
    s_test->add_option("--level", tst.level, "test level")->check(CLI::Range(1e-9, 1.0));
    s_test->add_option("--radius", tst.radius, "neighborhood radius (0 = recommended)");
    s_test->add_option("--tau2", tst.tau2, "'estimate' or a fixed nugget variance");
    s_test->add_option("--nugget-pairs", tst.nugget_pairs, "pairs per lag class for the nugget estimate");
    s_test->add_flag("--literal-eq7", tst.literal_eq7, "use the |N_i|-normalized printed form");
    s_test->callback([&] { rc = run_test(tst); });

    // segment --------------------------------------------------------------------
    SegmentArgs seg;
    auto* s_seg = app.add_subcommand("segment", "BIC-selected Voronoi segmentation");
    s_seg->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    s_seg->add_option("--config", cfg_seg, "JSON config file");
    s_seg->add_option("--seed", seg.seed, "reserved (search is deterministic)");
    s_seg->add_option("--in", seg.in, "input CSV (x,y,z)")->required();
    s_seg->add_option("--kmax", seg.kmax, "largest K to score")->check(CLI::PositiveNumber);
    s_seg->add_option("--radius", seg.radius, "neighborhood radius (0 = recommended)");
    s_seg->add_option("--tau2", seg.tau2, "'estimate' or a fixed nugget variance");
    s_seg->add_option("--nugget-pairs", seg.nugget_pairs, "pairs per lag class for the nugget estimate");
    s_seg->add_flag("--literal-eq7", seg.literal_eq7, "use the |N_i|-normalized printed form");
    s_seg->add_option("--min-count", seg.min_count, "minimum active sites per segment")
        ->check(CLI::Range(2, 1000000));
    s_seg->add_option("--labels-out", seg.labels_out, "CSV of active-site labels");
    s_seg->add_option("--svg-out", seg.svg_out, "SVG map of the selected segmentation");
    s_seg->add_flag("--json", seg.emit_json_report, "print the BIC table as JSON");
    s_seg->callback([&] { rc = run_segment(seg); });

    // krige ---------------------------------------------------------------------
    KrigeArgs kr;
    auto* s_kr = app.add_subcommand("krige", "Stationary or piecewise kriging predictions");
    s_kr->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    s_kr->add_option("--config", cfg_krige, "JSON config file");
    s_kr->add_option("--seed", kr.seed, "reserved (kriging is deterministic)");
    s_kr->add_option("--train", kr.train, "training CSV (x,y,z)")->required();
    s_kr->add_option("--predict", kr.predict, "prediction CSV (x,y with optional z for scoring)");
    s_kr->add_option("--grid", kr.grid, "prediction grid NXxNY over the training domain");
    s_kr->add_option("--out", kr.out, "predictions CSV (x,y,mean,sd,region)")->required();
    s_kr->add_option("--K", kr.K, "number of subregions (0 = choose by BIC)")
        ->check(CLI::Range(0, 1000));
    s_kr->add_option("--kmax", kr.kmax, "largest K scored when --K 0")->check(CLI::PositiveNumber);
    s_kr->add_option("--radius", kr.radius, "neighborhood radius (0 = recommended)");
    s_kr->add_option("--tau2", kr.tau2, "'estimate' or a fixed nugget variance");
    s_kr->add_option("--nugget-pairs", kr.nugget_pairs, "pairs per lag class for the nugget estimate");
    s_kr->add_flag("--literal-eq7", kr.literal_eq7, "use the |N_i|-normalized printed form");
    s_kr->add_option("--min-count", kr.min_count, "minimum active sites per segment")
        ->check(CLI::Range(2, 1000000));
    s_kr->callback([&] { rc = run_krige(kr); });

    // fetch-colorado ----------------------------------------------------------
    FetchArgs fetch;
    auto* s_fetch = app.add_subcommand("fetch-colorado", "Cached precipitation dataset workflow");
    s_fetch->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    s_fetch->add_option("--config", cfg_fetch, "JSON config file");
    s_fetch->add_option("--seed", fetch.seed, "reserved (fetch is deterministic)");
    s_fetch->add_option("--cache", fetch.cache_dir, "cache directory");
    s_fetch->add_option("--base-url", fetch.base_url, "override the raw-data base URL");
    s_fetch->add_option("--loc-file", fetch.loc_file, "override the station-location file name");
    s_fetch->add_option("--ppt-file", fetch.ppt_file, "override the monthly-precipitation file name");
    s_fetch->add_flag("--offline", fetch.offline, "never touch the network");
    s_fetch->add_option("--year", fetch.year, "calendar year to accumulate");
    s_fetch->add_option("--expected-stations", fetch.expected_stations,
                        "station-count check (0 disables)");
    s_fetch->add_option("--out", fetch.out, "also write the processed CSV here");
    s_fetch->callback([&] { rc = run_fetch(fetch); });

    // bench --------------------------------------------------------------------
    BenchArgs bench;
    auto* s_bench = app.add_subcommand("bench", "Wall-clock micro-benchmarks of the core operations");
    s_bench->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    s_bench->add_option("--config", cfg_bench, "JSON config file");
    s_bench->add_option("--seed", bench.seed, "random seed of the benchmark data");
    s_bench->add_option("--n", bench.n, "number of benchmark sites")->check(CLI::PositiveNumber);
    s_bench->add_option("--reps", bench.reps, "repetitions per item (median reported)")
        ->check(CLI::PositiveNumber);
    s_bench->add_flag("--json", bench.emit_json_report, "print results as JSON");
    s_bench->callback([&] { rc = run_bench(bench); });

    try {
        inject_config(app, args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const spatseg::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return rc;
}
