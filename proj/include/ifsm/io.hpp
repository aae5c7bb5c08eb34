#pragma once

#include "ifsm/coeff_vector.hpp"
#include "ifsm/filterbank.hpp"
#include "ifsm/hutchinson.hpp"
#include "ifsm/nadic_measure.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ifsm::io {

/// Shortest round-trip decimal form; always carries a '.' or exponent.
std::string format_double(double x);

/// "a:b:n" -> n equispaced points from a to b inclusive.
std::vector<double> parse_grid(std::string_view spec);

// { "n": N, "filters": [ { "min_degree": d0, "coeffs": [[re, im], ...] }, ... ] }
FilterBank bank_from_json(const nlohmann::json& j);
nlohmann::json bank_to_json(const FilterBank& fb);

// { "entries": [ [n, re, im], ... ] }
CoeffVector vector_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const CoeffVector& f);

// { "maps": [ {"a": ..., "b": ...}, ... ], "weights": [...] }
AffineIFS ifs_from_json(const nlohmann::json& j);
nlohmann::json ifs_to_json(const AffineIFS& ifs);

/// Parses a whole file; throws ParseError with the path on failure.
nlohmann::json read_json_file(const std::filesystem::path& path);

/// numerator,depth,base,position_float,mass
std::string atoms_csv(const AtomicMeasure& mu);
/// t_or_x,re,im
std::string complex_series_csv(std::span<const double> xs, std::span<const Complex> values);
/// x,F
std::string cdf_csv(std::span<const double> xs, std::span<const double> values);
/// position,mass
std::string cloud_csv(const PointMassCloud& cloud);

/// Writes to a sibling temp file and renames it over `path`.
void write_atomically(const std::filesystem::path& path, std::string_view content);

} // namespace ifsm::io
