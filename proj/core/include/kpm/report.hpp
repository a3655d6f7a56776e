#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kpm/cpcam.hpp"
#include "kpm/kpm.hpp"

namespace kpm {

/// Deterministic decimal formatting: 12 significant digits, locale-free.
/// Identical inputs therefore serialize to byte-identical documents.
std::string format_number(double v);

/// Comma-joined vector with format_number components.
std::string format_vector(const VectorXd& v);

/// The `clear --mechanism kpm` result document: fixed key order, one
/// `key = value` per line.
std::string format_clearing_result(const ClearingResult& result);

/// The `clear --mechanism cpcam` result document.
std::string format_cpcam_result(const CpcamSolution& sol);

/// Parse a result document back into ordered (key, value) pairs.
std::vector<std::pair<std::string, std::string>> parse_key_value(const std::string& text);

}  // namespace kpm
