#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace classlab {

//---------------------------------------------------------------------------//
/*!
 * 64-bit seed of a per-student data stream.
 *
 * Seeds are derived from text (session key and student id), never drawn
 * from the environment, so the same student always sees the same data.
 */
struct Seed
{
    std::uint64_t value{0};

    friend constexpr auto operator<=>(Seed, Seed) = default;
};

// FNV-1a-64 over session_key ++ 0x1F ++ student_id.
Seed derive_seed(std::string_view session_key, std::string_view student_id);

//---------------------------------------------------------------------------//
/*!
 * SplitMix64 engine.
 *
 * The state advances by a fixed odd increment, so the k-th output only
 * depends on (seed, k) and can be computed directly with `word_at`.
 */
class SplitMix64
{
  public:
    static constexpr std::uint64_t increment = 0x9e3779b97f4a7c15ull;

    constexpr explicit SplitMix64(Seed seed) noexcept : state_(seed.value) {}

    constexpr std::uint64_t operator()() noexcept
    {
        state_ += increment;
        return mix(state_);
    }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Output of the (index+1)-th call on a fresh engine.
    static constexpr std::uint64_t word_at(Seed seed, std::uint64_t index) noexcept
    {
        return mix(seed.value + (index + 1) * increment);
    }

  private:
    std::uint64_t state_;
};

// Top 53 bits of a word scaled into [0, 1).
constexpr double to_unit_interval(std::uint64_t word) noexcept
{
    return static_cast<double>(word >> 11) * 0x1.0p-53;
}

// Element `index` of the uniform stream for `seed`.
inline double uniform_at(Seed seed, std::uint64_t index) noexcept
{
    return to_unit_interval(SplitMix64::word_at(seed, index));
}

// First `count` elements of the uniform stream; count must be positive.
std::vector<double> uniform_stream(Seed seed, std::size_t count);

//---------------------------------------------------------------------------//
// Distribution catalog
//---------------------------------------------------------------------------//
enum class Family
{
    exponential,
    normal,
    lognormal,
    uniform,
};

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

struct ExponentialParams
{
    double mean;
    friend bool operator==(ExponentialParams const&, ExponentialParams const&) = default;
};

struct NormalParams
{
    double mu;
    double sigma;
    friend bool operator==(NormalParams const&, NormalParams const&) = default;
};

struct LogNormalParams
{
    double mu_log;
    double sigma_log;
    friend bool operator==(LogNormalParams const&, LogNormalParams const&) = default;
};

struct UniformParams
{
    double lo;
    double hi;
    friend bool operator==(UniformParams const&, UniformParams const&) = default;
};

using DistributionParams
    = std::variant<ExponentialParams, NormalParams, LogNormalParams, UniformParams>;

//---------------------------------------------------------------------------//
/*!
 * Data-generating law of a session.
 *
 * Construction validates the parameters (positive scale, lo < hi, finite
 * moments); an invalid parameterization never exists as a value.
 */
class DistributionSpec
{
  public:
    using NamedParam = std::pair<std::string, double>;

    explicit DistributionSpec(DistributionParams params);

    static DistributionSpec exponential(double mean);
    static DistributionSpec normal(double mu, double sigma);
    static DistributionSpec lognormal(double mu_log, double sigma_log);
    static DistributionSpec uniform(double lo, double hi);

    // Build from a family name's parameter list, e.g. {"mean", 50}.
    static DistributionSpec from_named(Family family,
                                       std::span<NamedParam const> params);

    Family family() const noexcept;
    DistributionParams const& params() const noexcept { return params_; }
    std::vector<NamedParam> named_params() const;

    double theoretical_mean() const noexcept;
    double theoretical_sd() const noexcept;
    bool in_support(double x) const noexcept;

    friend bool operator==(DistributionSpec const&, DistributionSpec const&) = default;

  private:
    DistributionParams params_;
};

// Standard normal quantile by Acklam's rational approximation (no
// refinement step). p == 0 is evaluated at 2^-54 so the result is finite.
double inverse_normal(double p);

// Quantile function of `spec`; u must lie in [0, 1).
double inverse_cdf(DistributionSpec const& spec, double u);

//---------------------------------------------------------------------------//
/*!
 * A student's observations: the first n draws of the stream (seed, spec).
 */
struct Dataset
{
    std::vector<double> values;
    std::size_t n{0};
    Seed seed;
    DistributionSpec spec{ExponentialParams{1.0}};

    friend bool operator==(Dataset const&, Dataset const&) = default;
};

Dataset sample_prefix(DistributionSpec const& spec, Seed seed, std::size_t n);

}  // namespace classlab
