#include "classlab/rng.hpp"

#include <cmath>
#include <limits>

#include "classlab/errors.hpp"

namespace classlab {
namespace {

constexpr std::uint64_t fnv_offset = 0xcbf29ce484222325ull;
constexpr std::uint64_t fnv_prime = 0x100000001b3ull;
constexpr unsigned char key_separator = 0x1f;

std::uint64_t fnv1a_update(std::uint64_t hash, std::string_view bytes)
{
    for (char c : bytes)
    {
        hash ^= static_cast<unsigned char>(c);
        hash *= fnv_prime;
    }
    return hash;
}

void require_finite(double value, char const* field)
{
    if (!std::isfinite(value))
    {
        throw ValidationError(std::string(field) + " must be finite", field);
    }
}

void validate(ExponentialParams const& p)
{
    require_finite(p.mean, "mean");
    if (!(p.mean > 0))
    {
        throw ValidationError("exponential mean must be positive", "mean");
    }
}

void validate(NormalParams const& p)
{
    require_finite(p.mu, "mu");
    require_finite(p.sigma, "sigma");
    if (!(p.sigma > 0))
    {
        throw ValidationError("normal sigma must be positive", "sigma");
    }
}

void validate(LogNormalParams const& p)
{
    require_finite(p.mu_log, "mu_log");
    require_finite(p.sigma_log, "sigma_log");
    if (!(p.sigma_log > 0))
    {
        throw ValidationError("lognormal sigma_log must be positive", "sigma_log");
    }
}

void validate(UniformParams const& p)
{
    require_finite(p.lo, "lo");
    require_finite(p.hi, "hi");
    if (!(p.lo < p.hi))
    {
        throw ValidationError("uniform bounds require lo < hi", "hi");
    }
    if (!std::isfinite(p.hi - p.lo))
    {
        throw ValidationError("uniform width overflows", "hi");
    }
}

double lookup(std::span<DistributionSpec::NamedParam const> params,
              std::string_view name)
{
    for (auto const& [key, value] : params)
    {
        if (key == name)
        {
            return value;
        }
    }
    throw ValidationError("missing distribution parameter '" + std::string(name) + "'",
                          std::string(name));
}

// Acklam's coefficients.
constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                        -2.759285104469687e+02, 1.383577518672690e+02,
                        -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                        -1.556989798598866e+02, 6.680131188771972e+01,
                        -1.328068155288572e+01};
constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                        -2.400758277161838e+00, -2.549732539343734e+00,
                        4.374664141464968e+00,  2.938163982698783e+00};
constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                        2.445134137142996e+00, 3.754408661907416e+00};
constexpr double p_low = 0.02425;
constexpr double p_high = 1 - p_low;

double tail_ratio(double q)
{
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
           / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
}

}  // namespace

//---------------------------------------------------------------------------//
Seed derive_seed(std::string_view session_key, std::string_view student_id)
{
    std::uint64_t hash = fnv1a_update(fnv_offset, session_key);
    hash ^= key_separator;
    hash *= fnv_prime;
    return Seed{fnv1a_update(hash, student_id)};
}

std::vector<double> uniform_stream(Seed seed, std::size_t count)
{
    if (count == 0)
    {
        throw ValidationError("uniform stream length must be positive", "count");
    }
    std::vector<double> result(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        result[i] = uniform_at(seed, i);
    }
    return result;
}

//---------------------------------------------------------------------------//
std::string_view to_string(Family family)
{
    switch (family)
    {
        case Family::exponential:
            return "exponential";
        case Family::normal:
            return "normal";
        case Family::lognormal:
            return "lognormal";
        case Family::uniform:
            return "uniform";
    }
    return "exponential";
}

Family family_from_string(std::string_view name)
{
    for (auto f : {Family::exponential, Family::normal, Family::lognormal, Family::uniform})
    {
        if (to_string(f) == name)
        {
            return f;
        }
    }
    throw ValidationError("unknown distribution family '" + std::string(name) + "'",
                          "family");
}

DistributionSpec::DistributionSpec(DistributionParams params) : params_(params)
{
    std::visit([](auto const& p) { validate(p); }, params_);
    if (!std::isfinite(this->theoretical_mean()) || !std::isfinite(this->theoretical_sd()))
    {
        throw ValidationError("distribution moments are not finite", "params");
    }
}

DistributionSpec DistributionSpec::exponential(double mean)
{
    return DistributionSpec{ExponentialParams{mean}};
}

DistributionSpec DistributionSpec::normal(double mu, double sigma)
{
    return DistributionSpec{NormalParams{mu, sigma}};
}

DistributionSpec DistributionSpec::lognormal(double mu_log, double sigma_log)
{
    return DistributionSpec{LogNormalParams{mu_log, sigma_log}};
}

DistributionSpec DistributionSpec::uniform(double lo, double hi)
{
    return DistributionSpec{UniformParams{lo, hi}};
}

DistributionSpec DistributionSpec::from_named(Family family,
                                              std::span<NamedParam const> params)
{
    switch (family)
    {
        case Family::exponential:
            return exponential(lookup(params, "mean"));
        case Family::normal:
            return normal(lookup(params, "mu"), lookup(params, "sigma"));
        case Family::lognormal:
            return lognormal(lookup(params, "mu_log"), lookup(params, "sigma_log"));
        case Family::uniform:
            return uniform(lookup(params, "lo"), lookup(params, "hi"));
    }
    throw ValidationError("unknown distribution family", "family");
}

Family DistributionSpec::family() const noexcept
{
    return static_cast<Family>(params_.index());
}

std::vector<DistributionSpec::NamedParam> DistributionSpec::named_params() const
{
    struct Visitor
    {
        std::vector<NamedParam> operator()(ExponentialParams const& p) const
        {
            return {{"mean", p.mean}};
        }
        std::vector<NamedParam> operator()(NormalParams const& p) const
        {
            return {{"mu", p.mu}, {"sigma", p.sigma}};
        }
        std::vector<NamedParam> operator()(LogNormalParams const& p) const
        {
            return {{"mu_log", p.mu_log}, {"sigma_log", p.sigma_log}};
        }
        std::vector<NamedParam> operator()(UniformParams const& p) const
        {
            return {{"lo", p.lo}, {"hi", p.hi}};
        }
    };
    return std::visit(Visitor{}, params_);
}

double DistributionSpec::theoretical_mean() const noexcept
{
    struct Visitor
    {
        double operator()(ExponentialParams const& p) const { return p.mean; }
        double operator()(NormalParams const& p) const { return p.mu; }
        double operator()(LogNormalParams const& p) const
        {
            return std::exp(p.mu_log + 0.5 * p.sigma_log * p.sigma_log);
        }
        double operator()(UniformParams const& p) const { return 0.5 * (p.lo + p.hi); }
    };
    return std::visit(Visitor{}, params_);
}

double DistributionSpec::theoretical_sd() const noexcept
{
    struct Visitor
    {
        double operator()(ExponentialParams const& p) const { return p.mean; }
        double operator()(NormalParams const& p) const { return p.sigma; }
        double operator()(LogNormalParams const& p) const
        {
            double s2 = p.sigma_log * p.sigma_log;
            return std::sqrt(std::expm1(s2)) * std::exp(p.mu_log + 0.5 * s2);
        }
        double operator()(UniformParams const& p) const
        {
            return (p.hi - p.lo) / std::sqrt(12.0);
        }
    };
    return std::visit(Visitor{}, params_);
}

bool DistributionSpec::in_support(double x) const noexcept
{
    struct Visitor
    {
        double x;
        bool operator()(ExponentialParams const&) const { return x >= 0; }
        bool operator()(NormalParams const&) const { return std::isfinite(x); }
        bool operator()(LogNormalParams const&) const { return x >= 0; }
        bool operator()(UniformParams const& p) const { return p.lo <= x && x <= p.hi; }
    };
    return std::isfinite(x) && std::visit(Visitor{x}, params_);
}

//---------------------------------------------------------------------------//
double inverse_normal(double p)
{
    if (p == 0)
    {
        p = 0x1.0p-54;
    }
    if (p < p_low)
    {
        double q = std::sqrt(-2 * std::log(p));
        return tail_ratio(q);
    }
    if (p <= p_high)
    {
        double q = p - 0.5;
        double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
               / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    }
    double q = std::sqrt(-2 * std::log(1 - p));
    return -tail_ratio(q);
}

double inverse_cdf(DistributionSpec const& spec, double u)
{
    if (!(u >= 0 && u < 1))
    {
        throw ValidationError("quantile level must lie in [0, 1)", "u");
    }
    struct Visitor
    {
        double u;
        double operator()(ExponentialParams const& p) const
        {
            return -p.mean * std::log(1 - u);
        }
        double operator()(NormalParams const& p) const
        {
            return p.mu + p.sigma * inverse_normal(u);
        }
        double operator()(LogNormalParams const& p) const
        {
            return std::exp(p.mu_log + p.sigma_log * inverse_normal(u));
        }
        double operator()(UniformParams const& p) const
        {
            return p.lo + u * (p.hi - p.lo);
        }
    };
    return std::visit(Visitor{u}, spec.params());
}

Dataset sample_prefix(DistributionSpec const& spec, Seed seed, std::size_t n)
{
    if (n == 0)
    {
        throw ValidationError("sample size must be positive", "n");
    }
    Dataset result{std::vector<double>(n), n, seed, spec};
    for (std::size_t i = 0; i < n; ++i)
    {
        result.values[i] = inverse_cdf(spec, uniform_at(seed, i));
    }
    return result;
}

}  // namespace classlab
