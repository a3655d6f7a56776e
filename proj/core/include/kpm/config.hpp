#pragma once

#include <string>

#include <Eigen/Dense>

#include "kpm/errors.hpp"

namespace kpm {

using Eigen::VectorXd;

/// Run parameters parsed from the key-value config file. Recognized keys:
/// mechanism, alpha, omega, prior, inventory, delta, tol. Lines are
/// `key = value`; blank lines and `#` comments are ignored.
struct RunConfig {
    enum class Mechanism { Kpm, Cpcam };

    Mechanism mechanism = Mechanism::Kpm;
    double alpha = 1.0;
    double omega = 0.0;
    double delta = 1e-4;   // CPCAM starting order
    double tol = 1e-9;
    std::string prior = "uniform";  // uniform | exponential[(rate)] | comma list
    std::string inventory;          // comma list; empty means zero inventory

    static RunConfig parse(const std::string& text);

    /// Resolve the prior spec to a strictly positive vector summing to 1:
    /// `uniform` -> 1/N each; `exponential(rate)` -> q_i proportional to
    /// e^{rate * i} (default rate 1); otherwise a comma list, normalized.
    VectorXd prior_vector(int n_states) const;

    /// Resolve the inventory spec (empty -> zeros).
    VectorXd inventory_vector(int n_states) const;
};

/// Parse a comma-separated list of decimal literals.
VectorXd parse_vector(const std::string& text);

}  // namespace kpm
