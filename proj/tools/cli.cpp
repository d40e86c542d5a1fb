#include "cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "scatteropt/analysis.hpp"
#include "scatteropt/error.hpp"
#include "scatteropt/optimizer.hpp"
#include "scatteropt/raster.hpp"
#include "scatteropt/registry.hpp"
#include "scatteropt/serialize.hpp"
#include "scatteropt/service.hpp"

namespace scatteropt {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        parts.emplace_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double parse_double(std::string_view text, std::string_view flag) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(v))
        throw UsageError(std::string(flag) + ": not a number: '" + std::string(text) + "'");
    return v;
}

std::size_t parse_count(std::string_view text, std::string_view flag) {
    std::size_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size())
        throw UsageError(std::string(flag) + ": not a non-negative integer: '" + std::string(text) + "'");
    return v;
}

// Grid values are printed and compared at 1e-12 resolution so that
// 0.05:0.95:0.05 reproduces the default rate grid exactly.
double tidy(double v) { return std::round(v * 1e12) / 1e12; }

std::vector<double> parse_list(const std::string& text, std::string_view flag) {
    std::vector<double> out;
    for (const auto& part : split(text, ',')) out.push_back(parse_double(part, flag));
    return out;
}

/// `A` (single value), `A:B` (default grid values inside [A, B]) or
/// `A:B:S` (A, A+S, ... up to B).
std::vector<double> parse_range_grid(const std::string& text, std::string_view flag,
                                     const std::vector<double>& defaults) {
    const auto parts = split(text, ':');
    if (parts.size() == 1) return {parse_double(parts[0], flag)};
    const double lo = parse_double(parts[0], flag);
    const double hi = parse_double(parts[1], flag);
    if (lo > hi) throw UsageError(std::string(flag) + ": min > max");
    std::vector<double> out;
    if (parts.size() == 2) {
        for (double v : defaults)
            if (v >= lo - 1e-9 && v <= hi + 1e-9) out.push_back(v);
    } else if (parts.size() == 3) {
        const double step = parse_double(parts[2], flag);
        if (!(step > 0.0)) throw UsageError(std::string(flag) + ": step must be positive");
        const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < count; ++i) out.push_back(tidy(lo + static_cast<double>(i) * step));
    } else {
        throw UsageError(std::string(flag) + ": expected A, A:B or A:B:S");
    }
    if (out.empty()) throw UsageError(std::string(flag) + ": no grid value in range");
    return out;
}

ClusterRange parse_clusters(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 2) throw UsageError("--clusters: expected A:B");
    const ClusterRange range{parse_count(parts[0], "--clusters"), parse_count(parts[1], "--clusters")};
    if (range.min < 1 || range.min > range.max) throw UsageError("--clusters: need 1 <= A <= B");
    return range;
}

std::vector<SamplerKind> parse_samplers(const std::string& text) {
    if (text.empty() || text == "all") return {kAllSamplers.begin(), kAllSamplers.end()};
    std::vector<SamplerKind> out;
    for (const auto& name : split(text, ',')) {
        const auto kind = parse_sampler(name);
        if (!kind) throw UsageError("unknown sampler: " + name);
        out.push_back(*kind);
    }
    return out;
}

SamplerKind parse_one_sampler(const std::string& text) {
    const auto kind = parse_sampler(text);
    if (!kind) throw UsageError("unknown sampler: " + text);
    return *kind;
}

void check_axis(const std::vector<double>& values, const char* flag, double lo, bool lo_open, double hi) {
    for (double v : values) {
        const bool ok = (lo_open ? v > lo : v >= lo) && v <= hi;
        if (!ok) throw UsageError(std::string(flag) + ": value " + std::to_string(v) + " out of range");
    }
}

// Where the points come from: a CSV file, a registered dataset, or a
// synthetic five-cluster mixture.
struct DataSource {
    std::string csv;
    std::string dataset;
    std::string x_col = "x";
    std::string y_col = "y";
    std::string name;
    std::string data_dir;
    std::size_t synthetic = 0;

    void add_to(CLI::App& cmd, bool allow_synthetic) {
        cmd.add_option("--data", csv, "CSV file with a header row");
        cmd.add_option("--dataset", dataset, "Registered dataset id");
        cmd.add_option("--x-col", x_col, "CSV column for x")->capture_default_str();
        cmd.add_option("--y-col", y_col, "CSV column for y")->capture_default_str();
        cmd.add_option("--data-dir", data_dir, "Registry directory (default: $SCATTEROPT_DATA_DIR or ./data)");
        if (allow_synthetic)
            cmd.add_option("--synthetic", synthetic, "Use N points of a five-cluster Gaussian mixture instead");
    }

    void validate() const {
        const int given = !csv.empty() + !dataset.empty() + (synthetic > 0);
        if (given != 1) throw UsageError("exactly one of --data, --dataset or --synthetic is required");
    }

    std::filesystem::path registry_dir() const {
        return data_dir.empty() ? Registry::default_dir() : std::filesystem::path(data_dir);
    }

    PointSet load(std::uint64_t seed) const {
        if (!csv.empty()) return load_csv(csv, x_col, y_col, name.empty() ? std::filesystem::path(csv).stem().string() : name);
        if (!dataset.empty()) return *Registry(registry_dir()).get(dataset);
        const auto centers = five_cluster_centers();
        return gaussian_mixture(synthetic, centers, 0.03, seed, "synthetic");
    }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << content;
    if (!out) throw Error("write failed: " + path);
}

// CSV writers take an ostream; route to a file or to `out`.
template <typename Fn>
void emit_csv(const std::string& path, std::ostream& out, Fn&& write) {
    if (path.empty() || path == "-") {
        write(out);
        return;
    }
    std::ostringstream buf;
    write(buf);
    write_file(path, buf.str());
}

void print_table(std::ostream& out, std::span<const RankedDesign> ranked) {
    out << std::left << std::setw(5) << "rank" << std::setw(28) << "sampler" << std::setw(8) << "rate"
        << std::setw(8) << "area" << std::setw(9) << "opacity" << std::setw(11) << "saliency" << "clusters\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& d = ranked[i];
        std::ostringstream row;
        row << std::left << std::setw(5) << i + 1 << std::setw(28) << to_string(d.params.sampler) << std::setw(8)
            << d.params.rate << std::setw(8) << d.params.point_area << std::setw(9) << d.params.opacity
            << std::setw(11) << std::fixed << std::setprecision(6) << d.score.value << d.score.count;
        out << row.str() << '\n';
    }
}

Service* g_serving = nullptr;

extern "C" void on_signal(int) {
    if (g_serving) g_serving->stop();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Scatterplot design optimizer: sweeps sampling, mark size and opacity for cluster saliency."};
    app.require_subcommand(1);
    app.set_version_flag("--version", "scatteropt 1.0.0");

    // load
    DataSource load_src;
    std::string load_name;
    auto* load = app.add_subcommand("load", "Register a CSV dataset");
    load->add_option("--data", load_src.csv, "CSV file with a header row")->required();
    load->add_option("--x-col", load_src.x_col, "CSV column for x")->capture_default_str();
    load->add_option("--y-col", load_src.y_col, "CSV column for y")->capture_default_str();
    load->add_option("--name", load_name, "Dataset name (default: file stem)");
    load->add_option("--data-dir", load_src.data_dir, "Registry directory");

    // optimize
    DataSource opt_src;
    std::string opt_sr, opt_ps, opt_op, opt_samplers, opt_clusters, opt_out;
    std::size_t opt_top = kDefaultTopK;
    std::uint64_t opt_seed = kDefaultSeed;
    unsigned opt_jobs = 0;
    bool opt_timings = false;
    auto* optimize = app.add_subcommand("optimize", "Sweep the design grid and rank designs by cluster saliency");
    opt_src.add_to(*optimize, true);
    optimize->add_option("--sr", opt_sr, "Sampling rates: A, A:B or A:B:S (default 0.05:0.95:0.05)");
    optimize->add_option("--ps", opt_ps, "Point areas in px^2, comma-separated (default 20,40,60,80)");
    optimize->add_option("--op", opt_op, "Opacities, comma-separated (default 0.01,0.05,0.1,0.2,0.4,0.8)");
    optimize->add_option("--samplers", opt_samplers, "Sampler names, comma-separated (default all)");
    optimize->add_option("--clusters", opt_clusters, "Admissible cluster counts A:B");
    optimize->add_option("--top", opt_top, "Number of ranked designs to keep")->capture_default_str();
    optimize->add_option("--seed", opt_seed, "Sampling seed")->capture_default_str();
    optimize->add_option("--out", opt_out, "Write the ranked designs as JSON");
    optimize->add_option("--jobs", opt_jobs, "Worker threads (default: all cores)");
    optimize->add_flag("--timings", opt_timings, "Include per-stage timings in the JSON");

    // render
    DataSource render_src;
    std::string render_sampler = "random", render_out;
    double render_rate = 0.1, render_ps = 40.0, render_op = 0.1;
    std::uint64_t render_seed = kDefaultSeed;
    auto* render_cmd = app.add_subcommand("render", "Rasterize one design to a grayscale PNG");
    render_src.add_to(*render_cmd, true);
    render_cmd->add_option("--sampler", render_sampler, "Sampler name")->capture_default_str();
    render_cmd->add_option("--rate", render_rate, "Sampling rate")->capture_default_str();
    render_cmd->add_option("--ps", render_ps, "Point area in px^2")->capture_default_str();
    render_cmd->add_option("--op", render_op, "Opacity")->capture_default_str();
    render_cmd->add_option("--seed", render_seed, "Sampling seed")->capture_default_str();
    render_cmd->add_option("--out", render_out, "Output PNG path")->required();

    // bench-sampling
    DataSource bs_src;
    std::string bs_samplers, bs_rates, bs_out;
    std::size_t bs_reps = 5;
    std::uint64_t bs_seed = kDefaultSeed;
    auto* bench_sampling = app.add_subcommand("bench-sampling", "Median subsampling time per sampler and rate");
    bs_src.add_to(*bench_sampling, true);
    bench_sampling->add_option("--samplers", bs_samplers, "Sampler names, comma-separated (default all)");
    bench_sampling->add_option("--sr", bs_rates, "Sampling rates: A, A:B or A:B:S (default grid)");
    bench_sampling->add_option("--reps", bs_reps, "Repetitions per cell")->capture_default_str();
    bench_sampling->add_option("--seed", bs_seed, "Seed")->capture_default_str();
    bench_sampling->add_option("--out", bs_out, "Output CSV (default stdout)");

    // bench-scaling
    std::string sc_sizes = "10000,100000,1000000", sc_sampler = "random", sc_out;
    double sc_rate = 0.5, sc_ps = 40.0, sc_op = 0.1;
    std::size_t sc_reps = 3;
    std::uint64_t sc_seed = kDefaultSeed;
    auto* bench_scaling = app.add_subcommand("bench-scaling", "Render + topology time against point count");
    bench_scaling->add_option("--sizes", sc_sizes, "Point counts, comma-separated")->capture_default_str();
    bench_scaling->add_option("--sampler", sc_sampler, "Sampler name")->capture_default_str();
    bench_scaling->add_option("--rate", sc_rate, "Sampling rate")->capture_default_str();
    bench_scaling->add_option("--ps", sc_ps, "Point area in px^2")->capture_default_str();
    bench_scaling->add_option("--op", sc_op, "Opacity")->capture_default_str();
    bench_scaling->add_option("--reps", sc_reps, "Repetitions per size")->capture_default_str();
    bench_scaling->add_option("--seed", sc_seed, "Seed")->capture_default_str();
    bench_scaling->add_option("--out", sc_out, "Output CSV (default stdout)");

    // quality
    DataSource q_src;
    std::string q_samplers, q_rates, q_ps, q_op, q_clusters, q_out;
    std::size_t q_reps = 3;
    std::uint64_t q_seed = kDefaultSeed;
    unsigned q_jobs = 0;
    auto* quality = app.add_subcommand("quality", "Fraction of encodings where each sampler attains the best saliency");
    q_src.add_to(*quality, true);
    quality->add_option("--samplers", q_samplers, "Sampler names, comma-separated (default all)");
    quality->add_option("--sr", q_rates, "Sampling rates: A, A:B or A:B:S (default grid)");
    quality->add_option("--ps", q_ps, "Point areas, comma-separated");
    quality->add_option("--op", q_op, "Opacities, comma-separated");
    quality->add_option("--clusters", q_clusters, "Admissible cluster counts A:B");
    quality->add_option("--reps", q_reps, "Repetitions (seeds) per rate")->capture_default_str();
    quality->add_option("--seed", q_seed, "Seed")->capture_default_str();
    quality->add_option("--jobs", q_jobs, "Worker threads (default: all cores)");
    quality->add_option("--out", q_out, "Output CSV (default stdout)");

    // serve
    std::string serve_bind = kDefaultBind, serve_dir, serve_static;
    int serve_port = kDefaultPort;
    unsigned serve_jobs = 0, serve_slots = 1;
    bool serve_openapi = false;
    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    serve->add_option("--bind", serve_bind, "Bind address")->capture_default_str();
    serve->add_option("--port", serve_port, "Port")->capture_default_str();
    serve->add_option("--data-dir", serve_dir, "Registry and job store directory");
    serve->add_option("--static", serve_static, "Directory with the built web UI");
    serve->add_option("--jobs", serve_jobs, "Worker threads per sweep (default: all cores)");
    serve->add_option("--slots", serve_slots, "Sweeps running at once")->capture_default_str();
    serve->add_flag("--print-openapi", serve_openapi, "Print the OpenAPI document and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*load) {
            load_src.name = load_name;
            const PointSet set = load_src.load(0);
            Registry registry(load_src.registry_dir());
            const std::string id = registry.add(set);
            out << id << '\n';
            return kExitOk;
        }

        if (*optimize) {
            opt_src.validate();
            SweepOptions options;
            if (!opt_sr.empty()) options.grid.rates = parse_range_grid(opt_sr, "--sr", default_rates());
            if (!opt_ps.empty()) options.grid.areas = parse_list(opt_ps, "--ps");
            if (!opt_op.empty()) options.grid.opacities = parse_list(opt_op, "--op");
            check_axis(options.grid.rates, "--sr", 0.0, true, 1.0);
            check_axis(options.grid.areas, "--ps", 0.0, true, 1e6);
            check_axis(options.grid.opacities, "--op", 0.0, true, 1.0);
            options.samplers = parse_samplers(opt_samplers);
            if (!opt_clusters.empty()) options.ranges.clusters = parse_clusters(opt_clusters);
            if (opt_top == 0) throw UsageError("--top must be >= 1");
            options.top_k = opt_top;
            options.seed = opt_seed;
            options.workers = opt_jobs;

            const PointSet set = opt_src.load(opt_seed);
            const SweepResult result = sweep(set, options);
            if (!opt_out.empty())
                write_file(opt_out, to_json(std::span<const RankedDesign>(result.ranked), opt_timings).dump(2) + "\n");
            out << "evaluated " << result.evaluated << " designs on " << set.size() << " points\n";
            print_table(out, result.ranked);
            return kExitOk;
        }

        if (*render_cmd) {
            render_src.validate();
            const SamplerKind kind = parse_one_sampler(render_sampler);
            check_axis({render_rate}, "--rate", 0.0, true, 1.0);
            check_axis({render_ps}, "--ps", 0.0, true, 1e6);
            check_axis({render_op}, "--op", 0.0, true, 1.0);
            const PointSet set = render_src.load(render_seed);
            const SampledSet sampled = sample(set, {kind, render_rate, render_seed});
            const auto png = encode_png(render(set, sampled, {render_ps, render_op}));
            write_file(render_out, std::string(png.begin(), png.end()));
            out << "wrote " << render_out << " (" << sampled.indices.size() << " of " << set.size() << " points)\n";
            return kExitOk;
        }

        if (*bench_sampling) {
            bs_src.validate();
            const auto kinds = parse_samplers(bs_samplers);
            const auto rates = bs_rates.empty() ? default_rates() : parse_range_grid(bs_rates, "--sr", default_rates());
            check_axis(rates, "--sr", 0.0, true, 1.0);
            if (bs_reps == 0) throw UsageError("--reps must be >= 1");
            const PointSet set = bs_src.load(bs_seed);
            const auto rows = time_samplers(set, rates, kinds, bs_reps, bs_seed);
            emit_csv(bs_out, out, [&](std::ostream& o) { write_timing_csv(o, rows); });
            return kExitOk;
        }

        if (*bench_scaling) {
            std::vector<std::size_t> sizes;
            for (const auto& part : split(sc_sizes, ',')) {
                sizes.push_back(parse_count(part, "--sizes"));
                if (sizes.back() == 0) throw UsageError("--sizes: counts must be positive");
            }
            const DesignParams params{parse_one_sampler(sc_sampler), sc_rate, sc_ps, sc_op, sc_seed};
            check_axis({sc_rate}, "--rate", 0.0, true, 1.0);
            check_axis({sc_ps}, "--ps", 0.0, true, 1e6);
            check_axis({sc_op}, "--op", 0.0, true, 1.0);
            if (sc_reps == 0) throw UsageError("--reps must be >= 1");
            const auto rows = scaling_curve(sizes, params, sc_reps);
            emit_csv(sc_out, out, [&](std::ostream& o) { write_scaling_csv(o, rows); });
            return kExitOk;
        }

        if (*quality) {
            q_src.validate();
            const auto kinds = parse_samplers(q_samplers);
            const auto rates = q_rates.empty() ? default_rates() : parse_range_grid(q_rates, "--sr", default_rates());
            check_axis(rates, "--sr", 0.0, true, 1.0);
            QualityOptions options;
            if (!q_ps.empty()) options.areas = parse_list(q_ps, "--ps");
            if (!q_op.empty()) options.opacities = parse_list(q_op, "--op");
            check_axis(options.areas, "--ps", 0.0, true, 1e6);
            check_axis(options.opacities, "--op", 0.0, true, 1.0);
            if (!q_clusters.empty()) options.clusters = parse_clusters(q_clusters);
            if (q_reps == 0) throw UsageError("--reps must be >= 1");
            options.seed = q_seed;
            options.workers = q_jobs;
            const PointSet set = q_src.load(q_seed);
            const auto rows = quality_rank(set, rates, kinds, q_reps, options);
            emit_csv(q_out, out, [&](std::ostream& o) { write_quality_csv(o, rows); });
            return kExitOk;
        }

        if (*serve) {
            if (serve_openapi) {
                out << openapi_document().dump(2) << '\n';
                return kExitOk;
            }
            ServiceConfig config;
            if (!serve_dir.empty()) config.data_dir = serve_dir;
            config.static_dir = serve_static;
            config.jobs = {serve_slots, serve_jobs};
            Service service(config);
            g_serving = &service;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            out << "serving on http://" << serve_bind << ':' << serve_port << '/' << std::endl;
            const bool ok = service.listen(serve_bind, serve_port);
            g_serving = nullptr;
            if (!ok) {
                err << "error: cannot listen on " << serve_bind << ':' << serve_port << '\n';
                return kExitRuntime;
            }
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const NotFoundError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const DuplicateError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace scatteropt
