#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "levybridge/domination.hpp"
#include "levybridge/jump_models.hpp"
#include "levybridge/path.hpp"
#include "levybridge/rng.hpp"
#include "levybridge/samplers.hpp"
#include "levybridge/verify.hpp"

namespace {

using namespace levybridge;
using nlohmann::json;

void write_text(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os << content;
}

struct SampleOpts {
    std::string model_spec;
    std::uint64_t seed = 0;
    long n = 1;
    std::string out;         // JSONL paths (or summary CSV with --format csv)
    std::string format = "json";
    std::string summary;     // optional summary CSV path
    std::string trajectory;  // optional trajectory CSV of the first sample
    double initial = 0.0;
    // bridge options
    std::string method = "mcmc";
    double x = 0.0, y = 1.0;
    double epsilon = 0.0;  // 0 -> 0.05 * IQR
    double burn_in = 50.0, sample_interval = 2.0;
    std::uint64_t max_events = 100'000'000;
    int chains = 1;
    int workers = 1;
    // perou
    double damping = 1.0;
};

struct CheckOpts {
    std::string model_spec;
    std::string identity;
    std::uint64_t seed = 0;
    long n = 100000;
    std::string out;
    std::string format = "table";
    std::string functional;  // filter by id; empty = whole library
    bool strict = false;
    int workers = 1;
    bool bridge = false;  // split identity on bridge samples
    double c = 1.0;
    double epsilon = 0.0;
    double burn_in = 50.0, sample_interval = 2.0;
    std::uint64_t max_events = 100'000'000;
};

struct BoundsOpts {
    std::string model_spec;
    std::uint64_t seed = 0;  // unused, kept for interface uniformity
    double grid_halfwidth = 50.0;
    int grid_points = 1001;
    std::string out;
    std::string curve_out;
};

struct DominateOpts {
    std::string model_spec;
    std::uint64_t seed = 0;
    double c = 1.0;
    long n = 20000;
    std::string method = "mcmc";
    double epsilon = 0.0;
    double grid_halfwidth = 50.0;
    int grid_points = 1001;
    double burn_in = 50.0, sample_interval = 2.0;
    std::uint64_t max_events = 100'000'000;
    std::string out;
    std::string tails_out;
};

std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json base_config(const std::string& command, const std::string& model, std::uint64_t seed, long n) {
    json j;
    j["command"] = command;
    j["model"] = model;
    j["seed"] = seed;
    j["n"] = n;
    return j;
}

// ---------------------------------------------------------------------------

int run_sample_levy(const SampleOpts& o) {
    const JumpDensity model = parse_family(o.model_spec);
    Rng rng(o.seed);
    std::vector<JumpPath> paths;
    paths.reserve(static_cast<std::size_t>(o.n));
    for (long i = 0; i < o.n; ++i) paths.push_back(sample_compound_poisson(model, o.initial, rng));

    json cfg = base_config("sample-levy", o.model_spec, o.seed, o.n);
    cfg["initial"] = o.initial;
    cfg["format"] = o.format;

    std::ostringstream summary;
    summary << "# config: " << cfg.dump() << "\ncount,terminal\n";
    for (const auto& p : paths)
        summary << p.jump_count() << "," << csv_num(p.terminal_value()) << "\n";

    if (o.format == "csv") {
        write_text(o.out, summary.str());
    } else {
        std::ostringstream os;
        os << json{{"config", cfg}}.dump() << "\n";
        for (const auto& p : paths) os << to_jsonl(p) << "\n";
        write_text(o.out, os.str());
    }
    if (!o.summary.empty()) write_text(o.summary, summary.str());
    if (!o.trajectory.empty() && !paths.empty()) {
        std::ostringstream os;
        paths.front().write_csv(os);
        write_text(o.trajectory, os.str());
    }
    return 0;
}

int run_sample_bridge(const SampleOpts& o) {
    const JumpDensity model = parse_family(o.model_spec);
    std::vector<JumpPath> paths;
    paths.reserve(static_cast<std::size_t>(o.n));
    json cfg = base_config("sample-bridge", o.model_spec, o.seed, o.n);
    cfg["method"] = o.method;
    cfg["x"] = o.x;
    cfg["y"] = o.y;
    cfg["format"] = o.format;

    if (o.method == "rejection") {
        const double eps = o.epsilon > 0.0 ? o.epsilon : default_bridge_epsilon(model);
        cfg["epsilon"] = eps;
        Rng rng(o.seed);
        std::uint64_t trials = 0;
        for (long i = 0; i < o.n; ++i) {
            auto s = sample_bridge_rejection(model, o.x, o.y, eps, rng);
            trials += s.trials;
            paths.push_back(std::move(s.path));
        }
        cfg["total_trials"] = trials;
        cfg["acceptance_rate"] = static_cast<double>(o.n) / static_cast<double>(trials);
    } else if (o.method == "mcmc") {
        cfg["burn_in"] = o.burn_in;
        cfg["sample_interval"] = o.sample_interval;
        cfg["chains"] = o.chains;
        const long per_chain = (o.n + o.chains - 1) / o.chains;
        std::vector<std::vector<JumpPath>> chain_out(static_cast<std::size_t>(o.chains));
        auto run_chain = [&](int j) {
            const long want = std::min<long>(per_chain, o.n - static_cast<long>(j) * per_chain);
            if (want <= 0) return;
            ChainConfig cc;
            cc.burn_in = o.burn_in;
            cc.sample_interval = o.sample_interval;
            cc.max_events = o.max_events;
            cc.seed = derive_child_seed(o.seed, static_cast<std::uint64_t>(j));
            auto res = sample_bridge_mcmc(model, o.x, o.y, nullptr, static_cast<std::size_t>(want), cc);
            if (res.truncated) throw std::runtime_error("sample-bridge: chain event cap exceeded");
            chain_out[static_cast<std::size_t>(j)] = std::move(res.paths);
        };
        if (o.workers > 1 && o.chains > 1) {
            std::vector<std::future<void>> fs;
            for (int j = 0; j < o.chains; ++j)
                fs.push_back(std::async(std::launch::async, run_chain, j));
            for (auto& f : fs) f.get();
        } else {
            for (int j = 0; j < o.chains; ++j) run_chain(j);
        }
        for (auto& v : chain_out)
            for (auto& p : v) paths.push_back(std::move(p));
    } else {
        throw CLI::ValidationError("--method must be mcmc or rejection");
    }

    std::ostringstream summary;
    summary << "# config: " << cfg.dump() << "\ncount,terminal\n";
    for (const auto& p : paths)
        summary << p.jump_count() << "," << csv_num(p.terminal_value()) << "\n";

    if (o.format == "csv") {
        write_text(o.out, summary.str());
    } else {
        std::ostringstream os;
        os << json{{"config", cfg}}.dump() << "\n";
        for (const auto& p : paths) os << to_jsonl(p) << "\n";
        write_text(o.out, os.str());
    }
    if (!o.summary.empty()) write_text(o.summary, summary.str());
    return 0;
}

int run_sample_perou(const SampleOpts& o) {
    const JumpDensity model = parse_family(o.model_spec);
    if (o.damping == 0.0) throw CLI::ValidationError("--c must be nonzero");
    Rng rng(o.seed);
    std::vector<OUPath> paths;
    paths.reserve(static_cast<std::size_t>(o.n));
    for (long i = 0; i < o.n; ++i) paths.push_back(sample_perou(model, o.damping, rng));

    json cfg = base_config("sample-perou", o.model_spec, o.seed, o.n);
    cfg["c"] = o.damping;
    cfg["format"] = o.format;

    std::ostringstream summary;
    summary << "# config: " << cfg.dump() << "\ncount,x0\n";
    for (const auto& p : paths)
        summary << p.jumps().size() << "," << csv_num(p.initial_value()) << "\n";

    if (o.format == "csv") {
        write_text(o.out, summary.str());
    } else {
        std::ostringstream os;
        os << json{{"config", cfg}}.dump() << "\n";
        for (const auto& p : paths) {
            json line = json::parse(to_jsonl(p.source()));
            line["x0"] = p.initial_value();
            os << line.dump() << "\n";
        }
        write_text(o.out, os.str());
    }
    if (!o.summary.empty()) write_text(o.summary, summary.str());
    if (!o.trajectory.empty() && !paths.empty()) {
        std::ostringstream os;
        paths.front().write_csv(os);
        write_text(o.trajectory, os.str());
    }
    return 0;
}

int run_check(const CheckOpts& o) {
    const JumpDensity model = parse_family(o.model_spec);
    std::vector<IdentityReport> reports;
    auto want = [&](const std::string& id) { return o.functional.empty() || o.functional == id; };

    if (o.identity == "mecke") {
        for (const auto& f : mecke_functional_library())
            if (want(f.id)) reports.push_back(check_mecke(model, f, o.n, o.seed, o.workers));
    } else if (o.identity == "bivariate") {
        for (const auto& f : bivariate_functional_library())
            if (want(f.id)) reports.push_back(check_bivariate_mecke(model, f, o.n, o.seed, o.workers));
    } else if (o.identity == "split") {
        PathBatchSampler bridge_source;
        if (o.bridge) {
            bridge_source = [&](std::size_t count, std::uint64_t block_seed) {
                ChainConfig cc;
                cc.burn_in = o.burn_in;
                cc.sample_interval = o.sample_interval;
                cc.max_events = o.max_events;
                cc.seed = block_seed;
                auto res = sample_bridge_mcmc(model, 0.0, o.c, nullptr, count, cc);
                if (res.truncated) throw std::runtime_error("check: chain event cap exceeded");
                return std::move(res.paths);
            };
        }
        for (const auto& f : split_functional_library(model))
            if (want(f.id))
                reports.push_back(check_split_identity(model, f, o.n, o.seed,
                                                       o.bridge ? &bridge_source : nullptr, o.workers));
    } else if (o.identity == "reweight") {
        for (const auto& f : reweight_functional_library())
            if (want(f.id))
                reports.push_back(check_density_reweighting(model, f, nullptr, o.n, o.seed, o.workers));
    } else if (o.identity == "diminished") {
        const double eps = o.epsilon > 0.0 ? o.epsilon : default_bridge_epsilon(model);
        for (const auto& f : diminished_functional_library())
            if (want(f.id))
                reports.push_back(check_diminished_density(model, o.c, eps, f, o.n, o.seed, o.workers));
    } else if (o.identity == "perou") {
        for (const auto& f : perou_functional_library(model))
            if (want(f.id)) reports.push_back(check_perou_identity(model, o.c, f, o.n, o.seed, o.workers));
    } else {
        throw CLI::ValidationError("--identity must be one of mecke|bivariate|split|reweight|diminished|perou");
    }
    if (reports.empty()) throw CLI::ValidationError("no functional matches '" + o.functional + "'");

    json cfg = base_config("check", o.model_spec, o.seed, o.n);
    cfg["identity"] = o.identity;
    cfg["workers"] = o.workers;
    cfg["strict"] = o.strict;
    if (!o.functional.empty()) cfg["functional"] = o.functional;
    if (o.identity == "diminished" || o.identity == "perou" || (o.identity == "split" && o.bridge))
        cfg["c"] = o.c;
    if (o.identity == "diminished")
        cfg["epsilon"] = o.epsilon > 0.0 ? o.epsilon : default_bridge_epsilon(model);
    if (o.identity == "split") cfg["bridge"] = o.bridge;

    json out;
    out["config"] = cfg;
    out["reports"] = json::array();
    for (const auto& r : reports) out["reports"].push_back(json::parse(to_json(r)));

    if (o.format == "json") {
        write_text(o.out, out.dump(2) + "\n");
    } else {
        std::ostringstream os;
        for (const auto& r : reports) os << to_table_row(r) << "\n";
        write_text("", os.str());
        if (!o.out.empty()) write_text(o.out, out.dump(2) + "\n");
    }

    if (o.strict) {
        for (const auto& r : reports)
            if (!(std::abs(r.z) < 3.0)) return 1;
    }
    return 0;
}

int run_bounds(const BoundsOpts& o) {
    const JumpDensity model = parse_family(o.model_spec);
    const ConvolutionBounds b = estimate_bounds(model, o.grid_halfwidth, o.grid_points);

    json cfg;
    cfg["command"] = "bounds";
    cfg["model"] = o.model_spec;
    cfg["grid_halfwidth"] = o.grid_halfwidth;
    cfg["grid_points"] = o.grid_points;

    json out;
    out["config"] = cfg;
    out["K_hat"] = b.upper_unbounded ? json("unbounded") : json(b.K_hat);
    out["k_hat"] = b.k_hat;
    out["upper_unbounded"] = b.upper_unbounded;
    out["grid"] = b.grid;
    out["tail_certificate"] = b.tail_certificate;
    write_text(o.out, out.dump(2) + "\n");

    if (!o.curve_out.empty()) {
        std::ostringstream os;
        os << "x,ratio\n";
        for (int i = 0; i < o.grid_points; ++i) {
            const double x =
                -o.grid_halfwidth + 2.0 * o.grid_halfwidth * static_cast<double>(i) / (o.grid_points - 1);
            std::string val = "inf";
            try {
                val = csv_num(convolution_ratio(model, x));
            } catch (const std::runtime_error&) {
            }
            os << csv_num(x) << "," << val << "\n";
        }
        write_text(o.curve_out, os.str());
    }
    return 0;
}

int run_dominate(const DominateOpts& o) {
    const JumpDensity model = parse_family(o.model_spec);
    const ConvolutionBounds bounds = estimate_bounds(model, o.grid_halfwidth, o.grid_points);
    ChainConfig cc;
    cc.burn_in = o.burn_in;
    cc.sample_interval = o.sample_interval;
    cc.max_events = o.max_events;
    const TailComparison t = bridge_count_report(
        model, o.c,
        o.method == "rejection" ? BridgeSamplerChoice::Rejection : BridgeSamplerChoice::Mcmc, bounds,
        static_cast<std::size_t>(o.n), o.seed, o.epsilon, &cc);

    json cfg = base_config("dominate", o.model_spec, o.seed, o.n);
    cfg["c"] = o.c;
    cfg["method"] = o.method;
    cfg["grid_halfwidth"] = o.grid_halfwidth;
    cfg["grid_points"] = o.grid_points;

    json out;
    out["config"] = cfg;
    out["verdict"] = json::parse(to_json(t));
    write_text(o.out, out.dump(2) + "\n");
    if (!o.tails_out.empty()) write_text(o.tails_out, tails_csv(t));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation and verification laboratory for first-moment-conditioned Poisson "
                 "point processes and pure-jump bridges"};
    app.require_subcommand(1);

    SampleOpts levy, bridge, perou;
    CheckOpts check;
    BoundsOpts bounds;
    DominateOpts dominate;

    auto add_common = [](CLI::App* cmd, SampleOpts& o) {
        cmd->add_option("--model", o.model_spec, "jump family spec")->required();
        cmd->add_option("--seed", o.seed, "RNG seed (required; no wall-clock default)")->required();
        cmd->add_option("--n", o.n, "number of samples")->check(CLI::PositiveNumber);
        cmd->add_option("--out", o.out, "output path ('-' = stdout)");
        cmd->add_option("--format", o.format, "json (paths as JSON-lines) or csv (summary)")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--summary", o.summary, "also write the summary CSV here");
        cmd->set_config("--config", "", "key=value config file; flags win");
    };

    CLI::App* c1 = app.add_subcommand("sample-levy", "forward compound-Poisson paths");
    add_common(c1, levy);
    c1->add_option("--initial", levy.initial, "Z_0");
    c1->add_option("--trajectory", levy.trajectory, "write the first path's t,value CSV here");

    CLI::App* c2 = app.add_subcommand("sample-bridge", "bridge paths pinned Z_0=x, Z_1=y");
    add_common(c2, bridge);
    c2->add_option("--method", bridge.method, "mcmc | rejection")
        ->check(CLI::IsMember({"mcmc", "rejection"}));
    c2->add_option("--x", bridge.x, "initial value");
    c2->add_option("--y", bridge.y, "terminal value");
    c2->add_option("--epsilon", bridge.epsilon, "rejection window (default 0.05*IQR)");
    c2->add_option("--burn-in", bridge.burn_in, "chain-time burn-in");
    c2->add_option("--sample-interval", bridge.sample_interval, "chain time between samples");
    c2->add_option("--max-events", bridge.max_events, "chain event cap");
    c2->add_option("--chains", bridge.chains, "independent chains")->check(CLI::PositiveNumber);
    c2->add_option("--workers", bridge.workers, "thread pool size (layout-neutral)")
        ->check(CLI::PositiveNumber);

    CLI::App* c3 = app.add_subcommand("sample-perou", "periodic damped paths driven by forward draws");
    add_common(c3, perou);
    c3->add_option("--c", perou.damping, "damping parameter (nonzero)");
    c3->add_option("--trajectory", perou.trajectory, "write the first path's t,value CSV here");

    CLI::App* c4 = app.add_subcommand("check", "Monte Carlo identity checks");
    c4->add_option("--model", check.model_spec, "jump family spec")->required();
    c4->add_option("--identity", check.identity, "mecke|bivariate|split|reweight|diminished|perou")
        ->required();
    c4->add_option("--seed", check.seed, "RNG seed")->required();
    c4->add_option("--n", check.n, "samples per estimator")->check(CLI::PositiveNumber);
    c4->add_option("--functional", check.functional, "run only this library functional");
    c4->add_option("--out", check.out, "JSON report path");
    c4->add_option("--format", check.format, "table | json")->check(CLI::IsMember({"table", "json"}));
    c4->add_flag("--strict", check.strict, "exit 1 when any |z| >= 3");
    c4->add_option("--workers", check.workers, "parallel sample blocks")->check(CLI::PositiveNumber);
    c4->add_flag("--bridge", check.bridge, "split identity: sample from the bridge, not forward");
    c4->add_option("--c", check.c, "bridge height / damping parameter");
    c4->add_option("--epsilon", check.epsilon, "diminished check window (default 0.05*IQR)");
    c4->add_option("--burn-in", check.burn_in, "bridge chain burn-in");
    c4->add_option("--sample-interval", check.sample_interval, "bridge chain sampling interval");
    c4->add_option("--max-events", check.max_events, "bridge chain event cap");
    c4->set_config("--config", "", "key=value config file; flags win");

    CLI::App* c5 = app.add_subcommand("bounds", "convolution bound estimates K, k");
    c5->add_option("--model", bounds.model_spec, "jump family spec")->required();
    c5->add_option("--grid-halfwidth", bounds.grid_halfwidth, "grid half-width")
        ->check(CLI::PositiveNumber);
    c5->add_option("--grid-points", bounds.grid_points, "grid points")->check(CLI::PositiveNumber);
    c5->add_option("--out", bounds.out, "JSON output path");
    c5->add_option("--curve-out", bounds.curve_out, "x,ratio CSV path");
    c5->set_config("--config", "", "key=value config file; flags win");

    CLI::App* c6 = app.add_subcommand("dominate", "bridge jump-count law vs conditioned Poisson");
    c6->add_option("--model", dominate.model_spec, "jump family spec")->required();
    c6->add_option("--seed", dominate.seed, "RNG seed")->required();
    c6->add_option("--c", dominate.c, "bridge height (nonzero)");
    c6->add_option("--n", dominate.n, "bridge samples")->check(CLI::PositiveNumber);
    c6->add_option("--method", dominate.method, "mcmc | rejection")
        ->check(CLI::IsMember({"mcmc", "rejection"}));
    c6->add_option("--epsilon", dominate.epsilon, "rejection window (default 0.05*IQR)");
    c6->add_option("--grid-halfwidth", dominate.grid_halfwidth, "bound-estimation grid half-width");
    c6->add_option("--grid-points", dominate.grid_points, "bound-estimation grid points");
    c6->add_option("--burn-in", dominate.burn_in, "chain burn-in");
    c6->add_option("--sample-interval", dominate.sample_interval, "chain sampling interval");
    c6->add_option("--max-events", dominate.max_events, "chain event cap");
    c6->add_option("--out", dominate.out, "JSON verdict path");
    c6->add_option("--tails-out", dominate.tails_out, "tail comparison CSV path");
    c6->set_config("--config", "", "key=value config file; flags win");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (c1->parsed()) return run_sample_levy(levy);
        if (c2->parsed()) return run_sample_bridge(bridge);
        if (c3->parsed()) return run_sample_perou(perou);
        if (c4->parsed()) return run_check(check);
        if (c5->parsed()) return run_bounds(bounds);
        if (c6->parsed()) return run_dominate(dominate);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
