#include "qtazrp/qcore.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

namespace qtazrp {

QParams::QParams(double q) : q_(q) {
  if (!(q > 0.0) || !(q < 1.0))
    throw std::invalid_argument("QParams: q must lie strictly in (0,1), got " + std::to_string(q));
}

RateProfile::RateProfile(double default_a, QParams q, std::map<int, double> overrides)
    : default_a_(default_a), overrides_(std::move(overrides)), q_(q) {
  if (!(default_a_ > 0.0))
    throw std::invalid_argument("RateProfile: default_a must be positive");
  for (const auto& [site, a] : overrides_) {
    if (!(a > 0.0))
      throw std::invalid_argument("RateProfile: conductance at site " + std::to_string(site) +
                                  " must be positive");
  }
}

double RateProfile::a(int site) const {
  auto it = overrides_.find(site);
  return it == overrides_.end() ? default_a_ : it->second;
}

double RateProfile::max_a() const {
  double m = default_a_;
  for (const auto& [site, a] : overrides_) m = std::max(m, a);
  return m;
}

double RateProfile::max_b_in(int lo, int hi) const {
  double m = 0.0;
  bool default_used = false;
  // Overrides inside [lo, hi]; default covers any remaining site in the window.
  auto it = overrides_.lower_bound(lo);
  int covered = 0;
  for (; it != overrides_.end() && it->first <= hi; ++it) {
    m = std::max(m, it->second);
    ++covered;
  }
  if (covered < hi - lo + 1) default_used = true;
  if (default_used || covered == 0) m = std::max(m, default_a_);
  return m * (1.0 - q_.q());
}

RateProfile RateProfile::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("rate profile: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("q") || !j.contains("default_a"))
    throw std::invalid_argument("rate profile: expected object with \"q\" and \"default_a\"");
  if (!j["q"].is_number() || !j["default_a"].is_number())
    throw std::invalid_argument("rate profile: \"q\" and \"default_a\" must be numbers");
  std::map<int, double> overrides;
  if (j.contains("overrides")) {
    if (!j["overrides"].is_object())
      throw std::invalid_argument("rate profile: \"overrides\" must map site strings to rates");
    for (const auto& [key, val] : j["overrides"].items()) {
      char* end = nullptr;
      const long site = std::strtol(key.c_str(), &end, 10);
      if (end == key.c_str() || *end != '\0')
        throw std::invalid_argument("rate profile: override key \"" + key +
                                    "\" is not a decimal integer");
      if (!val.is_number())
        throw std::invalid_argument("rate profile: override value at \"" + key +
                                    "\" must be a number");
      overrides[static_cast<int>(site)] = val.get<double>();
    }
  }
  return RateProfile(j["default_a"].get<double>(), QParams(j["q"].get<double>()), std::move(overrides));
}

std::string RateProfile::to_json_text() const {
  nlohmann::json j;
  j["q"] = q_.q();
  j["default_a"] = default_a_;
  nlohmann::json ov = nlohmann::json::object();
  for (const auto& [site, a] : overrides_) ov[std::to_string(site)] = a;
  j["overrides"] = ov;
  return j.dump();
}

namespace {
bool weakly_decreasing(const std::vector<int>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i - 1] < v[i]) return false;
  return true;
}
}  // namespace

StateVector::StateVector(std::vector<int> coords) : StateVector(std::move(coords), true) {}

StateVector::StateVector(std::vector<int> coords, bool check)
    : coords_(std::move(coords)), ordered_(weakly_decreasing(coords_)) {
  if (coords_.empty()) throw std::invalid_argument("StateVector: empty coordinate list");
  if (check && !ordered_)
    throw StateOrderError("StateVector: coordinates must be weakly decreasing (use relaxed() for Z^n)");
}

StateVector StateVector::relaxed(std::vector<int> coords) {
  return StateVector(std::move(coords), false);
}

int StateVector::min_coord() const { return *std::min_element(coords_.begin(), coords_.end()); }
int StateVector::max_coord() const { return *std::max_element(coords_.begin(), coords_.end()); }

StateVector StateVector::lowered(int k) const {
  std::vector<int> c = coords_;
  c[static_cast<std::size_t>(k) - 1] -= 1;
  return StateVector::relaxed(std::move(c));
}

std::string to_string(const StateVector& X) {
  std::ostringstream os;
  os << '(';
  for (int k = 1; k <= X.n(); ++k) {
    if (k > 1) os << ',';
    os << X.at(k);
  }
  os << ')';
  return os.str();
}

StateVector StackDecomposition::reconstruct() const {
  std::vector<int> coords;
  for (const auto& e : entries)
    for (int j = 0; j < e.height; ++j) coords.push_back(e.site);
  return StateVector(std::move(coords));
}

double q_factorial(int k, const QParams& q) {
  if (k < 0) throw std::invalid_argument("q_factorial: negative k");
  double acc = 1.0;
  const double qq = q.q();
  double qpow = 1.0;
  for (int j = 1; j <= k; ++j) {
    qpow *= qq;
    acc *= (1.0 - qpow) / (1.0 - qq);
  }
  return acc;
}

StackDecomposition stacks(const StateVector& X) {
  if (!X.ordered()) throw StateOrderError("stacks: state must lie in W^n");
  StackDecomposition d;
  int count = 0;
  for (int k = 1; k <= X.n(); ++k) {
    if (d.entries.empty() || d.entries.back().site != X.at(k)) {
      d.entries.push_back({X.at(k), 1});
    } else {
      d.entries.back().height += 1;
    }
    ++count;
    if (k == X.n() || X.at(k + 1) != X.at(k)) d.cumulative.push_back(count);
  }
  return d;
}

double weight_W(const StateVector& X, const QParams& q) {
  if (!X.ordered()) throw StateOrderError("weight_W: state must lie in W^n");
  double w = 1.0;
  for (const auto& e : stacks(X).entries) w *= q_factorial(e.height, q);
  return w;
}

double rate_b(const RateProfile& profile, int site) { return profile.b(site); }

}  // namespace qtazrp
