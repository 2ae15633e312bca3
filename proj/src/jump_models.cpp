#include "levybridge/jump_models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "levybridge/quadrature.hpp"
#include "levybridge/rng.hpp"

namespace levybridge {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

// Breakpoint ladder for wide windows: geometric spacing from the outermost
// feature toward the edges keeps power-law tails resolvable panel by panel.
std::vector<double> window_breakpoints(double lo, double hi, std::vector<double> features) {
    std::vector<double> pts{lo, hi};
    double anchor = 1.0;
    for (double f : features) {
        anchor = std::max(anchor, std::abs(f));
        if (f > lo && f < hi) pts.push_back(f);
    }
    for (double v = anchor; v < hi / 8.0; v *= 8.0) pts.push_back(v);
    for (double v = -anchor; v > lo / 8.0; v *= 8.0) pts.push_back(v);
    return pts;
}

}  // namespace

// ---------------------------------------------------------------------------
// CauchyFamily

CauchyFamily::CauchyFamily(double alpha) : alpha_(alpha) {
    if (!(alpha > 1.0)) throw std::invalid_argument("CauchyFamily: alpha must be > 1");
    // 2 r int_0^inf (1 + y^alpha)^{-1} dy = 1 with the integral (pi/alpha)/sin(pi/alpha)
    norm_ = alpha * std::sin(kPi / alpha) / (2.0 * kPi);
}

double CauchyFamily::pdf(double x) const {
    return norm_ / (1.0 + std::pow(std::abs(x), alpha_));
}

double CauchyFamily::log_pdf(double x) const {
    return std::log(norm_) - std::log1p(std::pow(std::abs(x), alpha_));
}

double CauchyFamily::sample(Rng& rng) const {
    // two-piece envelope for |Y|: uniform on [0,1], Pareto y^{-alpha} on (1,inf)
    const double w_pareto = 1.0 / (alpha_ - 1.0);
    const double total = 1.0 + w_pareto;
    for (;;) {
        double y;
        if (rng.uniform01() * total < 1.0) {
            y = rng.uniform01();
            if (rng.uniform01() * (1.0 + std::pow(y, alpha_)) > 1.0) continue;
        } else {
            y = std::pow(rng.uniform_open01(), -1.0 / (alpha_ - 1.0));
            const double ya = std::pow(y, alpha_);
            if (rng.uniform01() * (1.0 + ya) > ya) continue;
        }
        return rng.uniform01() < 0.5 ? -y : y;
    }
}

double CauchyFamily::tail_mass_bound(double w) const {
    if (w <= 1.0) return 1.0;
    // (1 + y^a)^{-1} < y^{-a}
    return std::min(1.0, 2.0 * norm_ * std::pow(w, 1.0 - alpha_) / (alpha_ - 1.0));
}

std::string CauchyFamily::describe() const {
    return "cauchy(alpha=" + fmt(alpha_) + ")";
}

// ---------------------------------------------------------------------------
// ExpFamily

ExpFamily::ExpFamily(double beta) : beta_(beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("ExpFamily: beta must be > 0");
    norm_ = 1.0 / (2.0 * std::tgamma(1.0 + 1.0 / beta));
}

double ExpFamily::pdf(double x) const {
    return norm_ * std::exp(-std::pow(std::abs(x), beta_));
}

double ExpFamily::log_pdf(double x) const {
    return std::log(norm_) - std::pow(std::abs(x), beta_);
}

double ExpFamily::sample(Rng& rng) const {
    // |Y|^beta ~ Gamma(1/beta)
    const double t = rng.gamma(1.0 / beta_);
    const double y = std::pow(t, 1.0 / beta_);
    return rng.uniform01() < 0.5 ? -y : y;
}

double ExpFamily::tail_mass_bound(double w) const {
    // Gamma(s, z) <= 2 z^{s-1} e^{-z} for z >= 2 max(1, s-1), s = 1/beta
    const double s = 1.0 / beta_;
    const double zmin = 2.0 * std::max(1.0, s - 1.0);
    if (w <= 0.0 || std::pow(w, beta_) < zmin) return 1.0;
    const double z = std::pow(w, beta_);
    return std::min(1.0, (4.0 * norm_ / beta_) * std::pow(z, s - 1.0) * std::exp(-z));
}

std::string ExpFamily::describe() const {
    return "exp(beta=" + fmt(beta_) + ")";
}

// ---------------------------------------------------------------------------
// TruncatedDensity

TruncatedDensity::TruncatedDensity(std::shared_ptr<const DensityModel> base, double cutoff,
                                   double kept_mass)
    : base_(std::move(base)), cutoff_(cutoff), kept_mass_(kept_mass) {
    if (!(cutoff >= 0.0)) throw std::invalid_argument("TruncatedDensity: cutoff must be >= 0");
    if (!(kept_mass > 0.0)) throw std::invalid_argument("TruncatedDensity: no surviving mass");
}

double TruncatedDensity::pdf(double x) const {
    return std::abs(x) > cutoff_ ? base_->pdf(x) / kept_mass_ : 0.0;
}

double TruncatedDensity::log_pdf(double x) const {
    if (std::abs(x) <= cutoff_) return -HUGE_VAL;
    return base_->log_pdf(x) - std::log(kept_mass_);
}

double TruncatedDensity::sample(Rng& rng) const {
    for (;;) {
        const double y = base_->sample(rng);
        if (std::abs(y) > cutoff_) return y;
    }
}

double TruncatedDensity::tail_mass_bound(double w) const {
    return std::min(1.0, base_->tail_mass_bound(w) / kept_mass_);
}

std::string TruncatedDensity::describe() const {
    return "truncated(" + base_->describe() + ",cutoff=" + fmt(cutoff_) + ")";
}

// ---------------------------------------------------------------------------
// CustomDensity

CustomDensity::CustomDensity(std::function<double(double)> pdf, std::function<double(Rng&)> sampler,
                             std::function<double(double)> tail_mass_bound, std::string description)
    : pdf_(std::move(pdf)),
      sampler_(std::move(sampler)),
      tail_(std::move(tail_mass_bound)),
      description_(std::move(description)) {}

double CustomDensity::pdf(double x) const { return pdf_(x); }

double CustomDensity::log_pdf(double x) const { return std::log(pdf_(x)); }

double CustomDensity::sample(Rng& rng) const {
    if (!sampler_) throw std::runtime_error("CustomDensity: no sampler supplied");
    return sampler_(rng);
}

double CustomDensity::tail_mass_bound(double w) const {
    return tail_ ? std::min(1.0, tail_(w)) : 1.0;
}

std::string CustomDensity::describe() const { return description_; }

// ---------------------------------------------------------------------------
// JumpDensity

namespace {

double tail_halfwidth(const DensityModel& d, double mass) {
    double w = 1.0;
    while (d.tail_mass_bound(w) > mass && w < 1e290) w *= 2.0;
    return w;
}

double integrate_density(const DensityModel& d, double lo, double hi, double rel_tol = 1e-10) {
    auto pts = window_breakpoints(lo, hi, {0.0});
    // truncated densities are discontinuous at the cutoff
    if (const auto* td = dynamic_cast<const TruncatedDensity*>(&d)) {
        if (td->cutoff() > lo && td->cutoff() < hi) pts.push_back(td->cutoff());
        if (-td->cutoff() > lo && -td->cutoff() < hi) pts.push_back(-td->cutoff());
    }
    return integrate_adaptive([&](double x) { return d.pdf(x); }, pts, 0.0, rel_tol).value;
}

double quantile(const DensityModel& d, double w, double target) {
    double lo = -w, hi = w;
    for (int i = 0; i < 80 && hi - lo > 1e-9 * w; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double c = integrate_density(d, -w, mid, 1e-8);
        (c < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

JumpDensity::JumpDensity(double total_mass, std::shared_ptr<const DensityModel> density)
    : total_mass_(total_mass), density_(std::move(density)) {
    if (!(total_mass > 0.0)) throw std::invalid_argument("JumpDensity: lambda must be > 0");
    if (!density_) throw std::invalid_argument("JumpDensity: null density");
    const double w = tail_halfwidth(*density_, 1e-10);
    const double mass = integrate_density(*density_, -w, w);
    if (std::abs(mass - 1.0) > 1e-8) {
        throw std::invalid_argument("JumpDensity: density does not integrate to 1 (got " +
                                    fmt(mass) + ")");
    }
    iqr_ = quantile(*density_, w, 0.75) - quantile(*density_, w, 0.25);
}

double JumpDensity::log_intensity(double x) const {
    return std::log(total_mass_) + density_->log_pdf(x);
}

std::string JumpDensity::describe() const {
    return density_->describe() + " lambda=" + fmt(total_mass_);
}

// ---------------------------------------------------------------------------
// chi

double chi(const JumpDensity& model, double x1, double x2) {
    if (!std::isfinite(x1) || !std::isfinite(x2))
        throw std::invalid_argument("chi: arguments must be finite");
    // grouped so the value is bit-symmetric in (x1, x2)
    const double s =
        model.log_intensity(x1 + x2) - (model.log_intensity(x1) + model.log_intensity(x2));
    if (s > 709.0) {
        throw std::runtime_error("chi: log-space overflow at x1=" + fmt(x1) + ", x2=" + fmt(x2));
    }
    return std::exp(s);
}

// ---------------------------------------------------------------------------
// convolution machinery

namespace {

std::vector<double> density_features(const DensityModel& d) {
    std::vector<double> f{0.0};
    if (const auto* td = dynamic_cast<const TruncatedDensity*>(&d)) {
        f.push_back(td->cutoff());
        f.push_back(-td->cutoff());
    }
    return f;
}

// width w with pdf(w') <= level for w' beyond all features + w
double level_halfwidth(const DensityModel& d, double level) {
    double start = 1.0;
    for (double f : density_features(d)) start = std::max(start, std::abs(f) + 1.0);
    double w = start;
    while ((d.pdf(w) > level || d.pdf(-w) > level) && w < 1e290) w *= 2.0;
    return w;
}

double convolution_integral(const DensityModel& d, double x) {
    const double fx = d.pdf(x);
    if (!(fx > 0.0) || !std::isfinite(fx))
        throw std::runtime_error("convolution_ratio: density not evaluable at x=" + fmt(x));
    double w = level_halfwidth(d, 1e-13 * fx);
    for (int attempt = 0; attempt < 6; ++attempt) {
        const double lo = std::min(0.0, x) - w;
        const double hi = std::max(0.0, x) + w;
        std::vector<double> features{0.0, 0.5 * x, x};
        for (double f : density_features(d)) {
            features.push_back(f);
            features.push_back(x - f);
        }
        auto pts = window_breakpoints(lo, hi, features);
        const auto res = integrate_adaptive([&](double y) { return d.pdf(y) * d.pdf(x - y); }, pts,
                                            0.0, 1e-11, 6000);
        // neglected tails are bounded by 2 f(w); re-integrate wider if visible
        if (2.0 * std::max(d.pdf(hi), d.pdf(lo)) <= 1e-9 * res.value || res.value == 0.0)
            return res.value;
        w *= 4.0;
    }
    throw std::runtime_error("convolution_ratio: window extension failed at x=" + fmt(x));
}

}  // namespace

double convolution_ratio(const JumpDensity& model, double x) {
    const double fx = model.density(x);
    if (!(fx > 0.0))
        throw std::runtime_error("convolution_ratio: zero density at x=" + fmt(x));
    const double ratio = convolution_integral(model.model(), x) / fx;
    if (!std::isfinite(ratio))
        throw std::runtime_error("convolution_ratio: overflow at x=" + fmt(x));
    return ratio;
}

double cone_convolution(const JumpDensity& model, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("cone_convolution: x must be > 0");
    const auto& d = model.model();
    std::vector<double> pts{0.0, 0.5 * x, x};
    for (double f : density_features(d)) {
        if (f > 0.0 && f < x) pts.push_back(f);
        if (x - f > 0.0 && x - f < x) pts.push_back(x - f);
    }
    return integrate_adaptive([&](double y) { return d.pdf(y) * d.pdf(x - y); }, pts, 1e-300, 1e-10)
        .value;
}

ConvolutionBounds estimate_bounds(const JumpDensity& model, double grid_halfwidth, int grid_points) {
    if (grid_points < 3) throw std::invalid_argument("estimate_bounds: need at least 3 grid points");
    if (!(grid_halfwidth > 0.0)) throw std::invalid_argument("estimate_bounds: bad grid halfwidth");

    ConvolutionBounds out;
    out.grid = "[-" + fmt(grid_halfwidth) + "," + fmt(grid_halfwidth) + "] x " +
               std::to_string(grid_points);

    double sup = -HUGE_VAL, inf = HUGE_VAL;
    for (int i = 0; i < grid_points; ++i) {
        const double x = -grid_halfwidth +
                         2.0 * grid_halfwidth * static_cast<double>(i) / (grid_points - 1);
        double r;
        try {
            r = convolution_ratio(model, x);
        } catch (const std::runtime_error&) {
            out.upper_unbounded = true;
            continue;
        }
        sup = std::max(sup, r);
        inf = std::min(inf, r);
    }
    if (!(inf < HUGE_VAL))
        throw std::runtime_error("estimate_bounds: ratio not evaluable anywhere on the grid");

    const double lam = model.total_mass();
    out.k_hat = lam * inf;
    out.K_hat = out.upper_unbounded ? HUGE_VAL : lam * sup;

    if (const auto* c = dynamic_cast<const CauchyFamily*>(&model.model())) {
        (void)c;
        out.tail_certificate = "power tails: ratio tends to 2 as |x| -> infinity; "
                               "grid maximum is near-asymptotic on wide grids";
    } else if (const auto* e = dynamic_cast<const ExpFamily*>(&model.model())) {
        out.tail_certificate = e->beta() >= 1.0
            ? "ratio grows without bound as |x| -> infinity"
            : "sub-exponential tails: ratio tends to 2 as |x| -> infinity";
    } else {
        out.tail_certificate = "no analytic tail certificate for this family";
    }
    return out;
}

JumpDensity truncate(const JumpDensity& model, double cutoff) {
    if (!(cutoff >= 0.0)) throw std::invalid_argument("truncate: cutoff must be >= 0");
    if (cutoff == 0.0) return model;
    const auto& d = model.model();
    auto pts = window_breakpoints(-cutoff, cutoff, density_features(d));
    const double inner = integrate_adaptive([&](double x) { return d.pdf(x); }, pts, 1e-300, 1e-12).value;
    const double kept = 1.0 - inner;
    if (!(kept > 1e-12)) throw std::invalid_argument("truncate: no surviving mass beyond cutoff");
    return JumpDensity(model.total_mass() * kept,
                       std::make_shared<TruncatedDensity>(model.model_ptr(), cutoff, kept));
}

// ---------------------------------------------------------------------------
// family grammar

namespace {

struct KvArgs {
    std::vector<std::pair<std::string, std::string>> kv;
    std::string nested;  // at most one nested family spec (for truncated)
};

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    std::size_t b = s.find_last_not_of(" \t");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

[[noreturn]] void parse_fail(const std::string& spec, const std::string& why) {
    throw std::invalid_argument("cannot parse family '" + spec + "': " + why + "\n" +
                                family_grammar());
}

KvArgs split_args(const std::string& spec, const std::string& inner) {
    KvArgs out;
    int depth = 0;
    std::string cur;
    auto flush = [&] {
        const std::string part = strip(cur);
        cur.clear();
        if (part.empty()) return;
        const auto eq = part.find('=');
        if (part.find('(') != std::string::npos) {
            if (!out.nested.empty()) parse_fail(spec, "more than one nested family");
            out.nested = part;
        } else if (eq != std::string::npos) {
            out.kv.emplace_back(strip(part.substr(0, eq)), strip(part.substr(eq + 1)));
        } else {
            parse_fail(spec, "expected key=value, got '" + part + "'");
        }
    };
    for (char ch : inner) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            flush();
        } else {
            cur.push_back(ch);
        }
    }
    flush();
    return out;
}

double need_number(const std::string& spec, const KvArgs& args, const std::string& key) {
    for (const auto& [k, v] : args.kv) {
        if (k == key) {
            try {
                std::size_t used = 0;
                const double x = std::stod(v, &used);
                if (used != v.size()) throw std::invalid_argument(v);
                return x;
            } catch (...) {
                parse_fail(spec, "bad number for '" + key + "': '" + v + "'");
            }
        }
    }
    parse_fail(spec, "missing parameter '" + key + "'");
}

}  // namespace

JumpDensity parse_family(const std::string& spec) {
    const std::string s = strip(spec);
    const auto open = s.find('(');
    if (open == std::string::npos || s.back() != ')') parse_fail(spec, "expected name(...)");
    const std::string name = strip(s.substr(0, open));
    const KvArgs args = split_args(spec, s.substr(open + 1, s.size() - open - 2));

    if (name == "cauchy") {
        return JumpDensity(need_number(spec, args, "lambda"),
                           std::make_shared<CauchyFamily>(need_number(spec, args, "alpha")));
    }
    if (name == "exp") {
        return JumpDensity(need_number(spec, args, "lambda"),
                           std::make_shared<ExpFamily>(need_number(spec, args, "beta")));
    }
    if (name == "laplace") {
        return JumpDensity(need_number(spec, args, "lambda"), std::make_shared<ExpFamily>(1.0));
    }
    if (name == "gauss") {
        return JumpDensity(need_number(spec, args, "lambda"), std::make_shared<ExpFamily>(2.0));
    }
    if (name == "truncated") {
        if (args.nested.empty()) parse_fail(spec, "truncated needs a nested family");
        return truncate(parse_family(args.nested), need_number(spec, args, "cutoff"));
    }
    parse_fail(spec, "unknown family '" + name + "'");
}

std::string family_grammar() {
    return "family grammar:\n"
           "  cauchy(alpha=<a>, lambda=<l>)        a > 1\n"
           "  exp(beta=<b>, lambda=<l>)            b > 0\n"
           "  laplace(lambda=<l>)                  alias exp(beta=1)\n"
           "  gauss(lambda=<l>)                    alias exp(beta=2)\n"
           "  truncated(<family>, cutoff=<c>)      jumps with |x| <= c removed";
}

}  // namespace levybridge
