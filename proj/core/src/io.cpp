#include "nsfe/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "nsfe/error.hpp"
#include "nsfe/xreal.hpp"

namespace nsfe {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_int(std::string_view s, std::int64_t& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::string to_decimal_string(const xreal& value) {
  return value.str(std::numeric_limits<xreal>::max_digits10, std::ios_base::scientific);
}

xreal xreal_from_string(const std::string& text) {
  try {
    return xreal(text);
  } catch (const std::exception& e) {
    throw ParseError(0, "invalid extended-precision decimal '" + text + "'");
  }
}

ThetaVector parse_theta(std::string_view text) {
  std::vector<double> values;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    const std::string_view field = trim(line);
    double v = 0.0;
    if (field.empty()) throw ParseError(line_no, "empty line");
    if (!parse_double(field, v)) {
      throw ParseError(line_no, "not a decimal number: '" + std::string(field) + "'");
    }
    values.push_back(v);
  }
  return ThetaVector(std::move(values));
}

ThetaVector read_theta_file(const std::string& path) {
  try {
    return parse_theta(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(e.line(), std::string(e.what()) + " (in " + path + ")");
  }
}

std::string format_theta(const ThetaVector& theta) {
  std::string out;
  for (double v : theta.values()) {
    out += format_double(v);
    out += '\n';
  }
  return out;
}

void write_theta_file(const std::string& path, const ThetaVector& theta) {
  write_text_file(path, format_theta(theta));
}

ProblemConfig parse_config(std::string_view text) {
  const std::string_view body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(0, std::string("invalid JSON config: ") + e.what());
    }
    try {
      return ProblemConfig(j.at("d").get<std::int64_t>(), j.at("s").get<std::int64_t>(),
                           j.at("eps").get<double>(), j.at("gamma").get<double>(),
                           j.value("c", ProblemConfig::kDefaultC));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(0, std::string("config JSON: ") + e.what());
    }
  }

  std::map<std::string, std::string, std::less<>> kv;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    if (key != "d" && key != "s" && key != "eps" && key != "gamma" && key != "c") {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
    kv[key] = std::string(trim(line.substr(eq + 1)));
  }
  auto need = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(0, std::string("missing key '") + key + "'");
    return it->second;
  };
  std::int64_t d = 0, s = 0;
  double eps = 0, gamma = 0, c = ProblemConfig::kDefaultC;
  if (!parse_int(need("d"), d)) throw ParseError(0, "d is not an integer");
  if (!parse_int(need("s"), s)) throw ParseError(0, "s is not an integer");
  if (!parse_double(need("eps"), eps)) throw ParseError(0, "eps is not a number");
  if (!parse_double(need("gamma"), gamma)) throw ParseError(0, "gamma is not a number");
  if (kv.count("c") && !parse_double(kv["c"], c)) throw ParseError(0, "c is not a number");
  return ProblemConfig(d, s, eps, gamma, c);
}

std::string config_to_json(const ProblemConfig& cfg) {
  nlohmann::ordered_json j;
  j["d"] = cfg.d();
  j["s"] = cfg.s();
  j["eps"] = cfg.eps();
  j["gamma"] = cfg.gamma();
  j["c"] = cfg.c();
  return j.dump();
}

std::string config_to_key_value(const ProblemConfig& cfg) {
  std::string out;
  out += "d=" + std::to_string(cfg.d()) + "\n";
  out += "s=" + std::to_string(cfg.s()) + "\n";
  out += "eps=" + format_double(cfg.eps()) + "\n";
  out += "gamma=" + format_double(cfg.gamma()) + "\n";
  out += "c=" + format_double(cfg.c()) + "\n";
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw IoError("write failure on '" + path + "'");
}

}  // namespace nsfe
