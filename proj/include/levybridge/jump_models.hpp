#pragma once

#include <functional>
#include <memory>
#include <string>

namespace levybridge {

class Rng;

// Normalized jump-size density f on the real line, with sampler and tail
// information. Implementations are immutable and reentrant.
class DensityModel {
public:
    virtual ~DensityModel() = default;
    virtual double pdf(double x) const = 0;
    virtual double log_pdf(double x) const = 0;
    virtual double sample(Rng& rng) const = 0;
    // Upper bound on P(|X| > w); used to size quadrature windows.
    virtual double tail_mass_bound(double w) const = 0;
    virtual std::string describe() const = 0;
};

// Cauchy-type family f(y) = r / (1 + |y|^alpha), alpha > 1,
// r = alpha sin(pi/alpha) / (2 pi).
class CauchyFamily final : public DensityModel {
public:
    explicit CauchyFamily(double alpha);
    double pdf(double x) const override;
    double log_pdf(double x) const override;
    double sample(Rng& rng) const override;
    double tail_mass_bound(double w) const override;
    std::string describe() const override;
    double alpha() const { return alpha_; }
    double normalizer() const { return norm_; }

private:
    double alpha_;
    double norm_;
};

// Symmetric exponential-type family f(y) = r e^{-|y|^beta}, beta > 0,
// r = 1 / (2 Gamma(1 + 1/beta)). beta = 1 is Laplace, beta = 2 Gaussian.
class ExpFamily final : public DensityModel {
public:
    explicit ExpFamily(double beta);
    double pdf(double x) const override;
    double log_pdf(double x) const override;
    double sample(Rng& rng) const override;
    double tail_mass_bound(double w) const override;
    std::string describe() const override;
    double beta() const { return beta_; }
    double normalizer() const { return norm_; }

private:
    double beta_;
    double norm_;
};

// Base density restricted to |x| > cutoff and renormalized.
class TruncatedDensity final : public DensityModel {
public:
    TruncatedDensity(std::shared_ptr<const DensityModel> base, double cutoff, double kept_mass);
    double pdf(double x) const override;
    double log_pdf(double x) const override;
    double sample(Rng& rng) const override;
    double tail_mass_bound(double w) const override;
    std::string describe() const override;
    double cutoff() const { return cutoff_; }

private:
    std::shared_ptr<const DensityModel> base_;
    double cutoff_;
    double kept_mass_;
};

// User-supplied density (tests, one-sided examples). The caller is
// responsible for normalization; the JumpDensity constructor re-checks it.
class CustomDensity final : public DensityModel {
public:
    CustomDensity(std::function<double(double)> pdf,
                  std::function<double(Rng&)> sampler,
                  std::function<double(double)> tail_mass_bound,
                  std::string description);
    double pdf(double x) const override;
    double log_pdf(double x) const override;
    double sample(Rng& rng) const override;
    double tail_mass_bound(double w) const override;
    std::string describe() const override;

private:
    std::function<double(double)> pdf_;
    std::function<double(Rng&)> sampler_;
    std::function<double(double)> tail_;
    std::string description_;
};

// Jump intensity nu(dx) = lambda f(x) dx. Immutable value type; evaluation
// is reentrant and safe for concurrent use.
class JumpDensity {
public:
    JumpDensity(double total_mass, std::shared_ptr<const DensityModel> density);

    double total_mass() const { return total_mass_; }
    double density(double x) const { return density_->pdf(x); }
    double log_density(double x) const { return density_->log_pdf(x); }
    double intensity(double x) const { return total_mass_ * density_->pdf(x); }
    double log_intensity(double x) const;
    double sample_size(Rng& rng) const { return density_->sample(rng); }
    double scale_iqr() const { return iqr_; }
    const DensityModel& model() const { return *density_; }
    std::shared_ptr<const DensityModel> model_ptr() const { return density_; }
    std::string describe() const;

private:
    double total_mass_;
    std::shared_ptr<const DensityModel> density_;
    double iqr_;
};

// Reciprocal characteristic chi(x1, x2) = nu(x1+x2) / (nu(x1) nu(x2)),
// evaluated in log space. Throws std::runtime_error (naming the arguments)
// if the log-space sum overflows.
double chi(const JumpDensity& model, double x1, double x2);

// (f * f)(x) / f(x) by adaptive quadrature with family-aware windows and
// breakpoints at the integrand's kinks/humps.
double convolution_ratio(const JumpDensity& model, double x);

// Half-line convolution: int_0^x f(y) f(x-y) dy, x > 0.
double cone_convolution(const JumpDensity& model, double x);

// Grid sup/inf of lambda * convolution_ratio. An overflowing ratio flags the
// upper bound as infinite instead of reporting a fabricated grid maximum.
struct ConvolutionBounds {
    double K_hat = 0.0;             // lambda * sup ratio over the grid
    double k_hat = 0.0;             // lambda * inf ratio over the grid
    bool upper_unbounded = false;   // ratio overflowed somewhere on the grid
    std::string grid;               // search-domain description
    std::string tail_certificate;   // analytic behavior beyond the grid, where known
};

ConvolutionBounds estimate_bounds(const JumpDensity& model, double grid_halfwidth, int grid_points);

// nu restricted to |x| > cutoff, renormalized into (lambda', f').
JumpDensity truncate(const JumpDensity& model, double cutoff);

// Family grammar:
//   cauchy(alpha=..., lambda=...) | exp(beta=..., lambda=...)
//   laplace(lambda=...) | gauss(lambda=...) | truncated(<family>, cutoff=...)
JumpDensity parse_family(const std::string& spec);
std::string family_grammar();

}  // namespace levybridge
