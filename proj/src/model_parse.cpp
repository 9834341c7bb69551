// Parser for the model mini-language used by the CLI:
//   exp(rho=1)  power(a=2)  compose(outer,inner)
//   perturbed(base,delta=0.5)  pwl(file=phi.json)

#include <cctype>
#include <fstream>
#include <stdexcept>

#include "fastesc/growth.hpp"

namespace fastesc {

namespace {

void skip_ws(const std::string& s, size_t& i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
}

std::string read_ident(const std::string& s, size_t& i) {
  skip_ws(s, i);
  size_t start = i;
  while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
  if (i == start) throw std::invalid_argument("model parse: expected a name at '" + s.substr(start) + "'");
  return s.substr(start, i - start);
}

void expect(const std::string& s, size_t& i, char c) {
  skip_ws(s, i);
  if (i >= s.size() || s[i] != c)
    throw std::invalid_argument(std::string("model parse: expected '") + c + "' in '" + s + "'");
  ++i;
}

double read_keyed_number(const std::string& s, size_t& i, const std::string& key) {
  std::string k = read_ident(s, i);
  if (k != key)
    throw std::invalid_argument("model parse: expected '" + key + "=', got '" + k + "'");
  expect(s, i, '=');
  skip_ws(s, i);
  size_t used = 0;
  double v = std::stod(s.substr(i), &used);
  if (used == 0) throw std::invalid_argument("model parse: expected a number after '" + key + "='");
  i += used;
  return v;
}

std::string read_keyed_string(const std::string& s, size_t& i, const std::string& key) {
  std::string k = read_ident(s, i);
  if (k != key)
    throw std::invalid_argument("model parse: expected '" + key + "=', got '" + k + "'");
  expect(s, i, '=');
  skip_ws(s, i);
  size_t start = i;
  int depth = 0;
  while (i < s.size() && (depth > 0 || (s[i] != ')' && s[i] != ','))) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    ++i;
  }
  std::string out = s.substr(start, i - start);
  while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
  return out;
}

PwlCurve load_pwl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("pwl: cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  const nlohmann::json& src = j.contains("breakpoints") ? j["breakpoints"] : j;
  PwlCurve curve;
  curve.t = src.at("t").get<std::vector<double>>();
  curve.ln_a = src.at("ln_a").get<std::vector<double>>();
  return curve;
}

}  // namespace

GrowthModel parse_model_expr(const std::string& s, size_t& i) {
  std::string name = read_ident(s, i);
  expect(s, i, '(');
  if (name == "exp") {
    double rho = read_keyed_number(s, i, "rho");
    expect(s, i, ')');
    return GrowthModel::exp_order(rho);
  }
  if (name == "power") {
    double a = read_keyed_number(s, i, "a");
    expect(s, i, ')');
    return GrowthModel::power(a);
  }
  if (name == "compose") {
    GrowthModel outer = parse_model_expr(s, i);
    expect(s, i, ',');
    GrowthModel inner = parse_model_expr(s, i);
    expect(s, i, ')');
    return GrowthModel::compose(std::move(outer), std::move(inner));
  }
  if (name == "perturbed") {
    GrowthModel base = parse_model_expr(s, i);
    expect(s, i, ',');
    double amp = read_keyed_number(s, i, "delta");
    expect(s, i, ')');
    return GrowthModel::perturbed(std::move(base), amp);
  }
  if (name == "pwl") {
    std::string path = read_keyed_string(s, i, "file");
    expect(s, i, ')');
    GrowthModel m = GrowthModel::piecewise_linear(load_pwl_file(path));
    m.pwl_origin_ = path;
    return m;
  }
  throw std::invalid_argument("model parse: unknown model '" + name +
                              "' (expected exp, power, compose, perturbed, pwl)");
}

GrowthModel GrowthModel::parse(const std::string& text) {
  size_t i = 0;
  GrowthModel m = parse_model_expr(text, i);
  skip_ws(text, i);
  if (i != text.size())
    throw std::invalid_argument("model parse: trailing input at '" + text.substr(i) + "'");
  return m;
}

}  // namespace fastesc
