#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "classlab/session.hpp"

namespace classlab {

struct SimulationOptions
{
    std::size_t students{80};
    std::uint64_t seed{0};
    // Each reported field is moved by noise * max(1, |truth|) in a random
    // direction; 0 reports the exact estimates.
    double noise{0.0};
};

struct SimulationReport
{
    std::size_t attempted{0};
    std::size_t accepted{0};
};

// Synthetic student ids: sim-0001, sim-0002, ...
std::string simulated_student_id(std::size_t index);

//---------------------------------------------------------------------------//
/*!
 * Run a synthetic class through the regular submission path.
 *
 * Every student fetches the dataset for each configured n, computes the
 * exact estimates, optionally perturbs them, and submits. Re-running with
 * the same arguments replaces the earlier rows.
 */
SimulationReport simulate_class(SessionManager& sessions, std::string const& session_id,
                                SimulationOptions const& options);

}  // namespace classlab
