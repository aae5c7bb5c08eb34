#include "ifsm/io.hpp"

#include "ifsm/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace ifsm::io {

using nlohmann::json;

std::string format_double(double x) {
  if (x == 0.0)
    x = 0.0; // no "-0.0"
  char buf[64];
  // general: shortest digits, and scientific once fixed form would pad with zeros
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general);
  std::string s(buf, res.ptr);
  if (std::isfinite(x) && s.find_first_of(".e") == std::string::npos)
    s += ".0";
  return s;
}

std::vector<double> parse_grid(std::string_view spec) {
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string_view::npos)
    throw ParseError("grid '" + std::string(spec) + "' is not of the form a:b:n");
  auto number = [&](std::string_view part) {
    double v = 0.0;
    const auto r = std::from_chars(part.data(), part.data() + part.size(), v);
    if (r.ec != std::errc() || r.ptr != part.data() + part.size() || !std::isfinite(v))
      throw ParseError("bad number '" + std::string(part) + "' in grid");
    return v;
  };
  const double a = number(spec.substr(0, c1));
  const double b = number(spec.substr(c1 + 1, c2 - c1 - 1));
  const auto count_part = spec.substr(c2 + 1);
  long n = 0;
  const auto r = std::from_chars(count_part.data(), count_part.data() + count_part.size(), n);
  if (r.ec != std::errc() || r.ptr != count_part.data() + count_part.size() || n < 1 || n > 100'000'000)
    throw ParseError("bad point count in grid '" + std::string(spec) + "'");
  if (n == 1) {
    if (a != b)
      throw ParseError("grid with one point needs a == b");
    return {a};
  }
  std::vector<double> xs(n);
  for (long i = 0; i < n; ++i)
    xs[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  xs.back() = b;
  return xs;
}

namespace {

double as_number(const json& j, const char* what) {
  if (!j.is_number())
    throw ParseError(std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v))
    throw ParseError(std::string(what) + " must be finite");
  return v;
}

std::int64_t as_integer(const json& j, const char* what) {
  if (!j.is_number_integer())
    throw ParseError(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

void only_keys(const json& j, std::initializer_list<const char*> keys, const char* what) {
  if (!j.is_object())
    throw ParseError(std::string(what) + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys)
      known = known || k == key;
    if (!known)
      throw ParseError(std::string(what) + ": unknown key '" + k + "'");
  }
  for (const char* key : keys)
    if (!j.contains(key))
      throw ParseError(std::string(what) + ": missing key '" + key + "'");
}

Complex as_complex(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw ParseError("coefficient must be [re, im]");
  return {as_number(j[0], "re"), as_number(j[1], "im")};
}

json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

} // namespace

FilterBank bank_from_json(const json& j) {
  only_keys(j, {"n", "filters"}, "filter bank");
  const auto n = as_integer(j["n"], "n");
  if (n < 2 || n > 1024)
    throw ParseError("filter bank n must be in 2..1024");
  if (!j["filters"].is_array())
    throw ParseError("filters must be an array");
  FilterBank fb{static_cast<int>(n), {}};
  for (const auto& f : j["filters"]) {
    only_keys(f, {"min_degree", "coeffs"}, "filter");
    const auto d0 = as_integer(f["min_degree"], "min_degree");
    if (!f["coeffs"].is_array() || f["coeffs"].empty())
      throw ParseError("filter coeffs must be a nonempty array");
    Eigen::VectorXcd c(static_cast<Eigen::Index>(f["coeffs"].size()));
    for (std::size_t i = 0; i < f["coeffs"].size(); ++i)
      c(static_cast<Eigen::Index>(i)) = as_complex(f["coeffs"][i]);
    fb.filters.emplace_back(d0, std::move(c));
  }
  fb.check_shape();
  return fb;
}

json bank_to_json(const FilterBank& fb) {
  json filters = json::array();
  for (const auto& m : fb.filters) {
    json coeffs = json::array();
    for (const auto& c : m.coeffs().values())
      coeffs.push_back(complex_to_json(c));
    filters.push_back({{"min_degree", m.min_degree()}, {"coeffs", coeffs}});
  }
  return {{"n", fb.n_channels}, {"filters", filters}};
}

CoeffVector vector_from_json(const json& j) {
  only_keys(j, {"entries"}, "coefficient vector");
  if (!j["entries"].is_array())
    throw ParseError("entries must be an array");
  std::vector<std::pair<std::int64_t, Complex>> entries;
  for (const auto& e : j["entries"]) {
    if (!e.is_array() || e.size() != 3)
      throw ParseError("vector entry must be [n, re, im]");
    const auto n = as_integer(e[0], "entry index");
    if (std::abs(n) > (std::int64_t{1} << 40))
      throw ParseError("vector entry index out of range");
    entries.emplace_back(n, Complex(as_number(e[1], "re"), as_number(e[2], "im")));
  }
  return CoeffVector::from_entries(entries);
}

json vector_to_json(const CoeffVector& f) {
  json entries = json::array();
  for (const auto& [n, c] : f.entries())
    entries.push_back(json::array({n, c.real(), c.imag()}));
  return {{"entries", entries}};
}

AffineIFS ifs_from_json(const json& j) {
  only_keys(j, {"maps", "weights"}, "IFS");
  if (!j["maps"].is_array() || !j["weights"].is_array())
    throw ParseError("IFS maps and weights must be arrays");
  AffineIFS ifs;
  for (const auto& m : j["maps"]) {
    only_keys(m, {"a", "b"}, "affine map");
    ifs.maps.push_back({as_number(m["a"], "a"), as_number(m["b"], "b")});
  }
  for (const auto& w : j["weights"])
    ifs.weights.push_back(as_number(w, "weight"));
  try {
    ifs.check();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return ifs;
}

json ifs_to_json(const AffineIFS& ifs) {
  json maps = json::array();
  for (const auto& m : ifs.maps)
    maps.push_back({{"a", m.a}, {"b", m.b}});
  return {{"maps", maps}, {"weights", ifs.weights}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string atoms_csv(const AtomicMeasure& mu) {
  std::ostringstream out;
  out << "numerator,depth,base,position_float,mass\n";
  for (const auto& a : mu.atoms)
    out << a.numerator << ',' << mu.depth << ',' << mu.base << ',' << format_double(mu.position(a)) << ','
        << format_double(a.mass) << '\n';
  return out.str();
}

std::string complex_series_csv(std::span<const double> xs, std::span<const Complex> values) {
  std::ostringstream out;
  out << "t_or_x,re,im\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << format_double(xs[i]) << ',' << format_double(values[i].real()) << ','
        << format_double(values[i].imag()) << '\n';
  return out.str();
}

std::string cdf_csv(std::span<const double> xs, std::span<const double> values) {
  std::ostringstream out;
  out << "x,F\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << format_double(xs[i]) << ',' << format_double(values[i]) << '\n';
  return out.str();
}

std::string cloud_csv(const PointMassCloud& cloud) {
  std::ostringstream out;
  out << "position,mass\n";
  for (const auto& p : cloud)
    out << format_double(p.position) << ',' << format_double(p.mass) << '\n';
  return out.str();
}

void write_atomically(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
      throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

} // namespace ifsm::io
