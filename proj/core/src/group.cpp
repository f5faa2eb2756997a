#include "localis/group.hpp"

#include <nlohmann/json.hpp>

#include <numeric>
#include <stdexcept>

namespace localis {

namespace {

void check_dim(const GroupDescriptor& G, const GroupElement& a, const char* what) {
  if (static_cast<int>(a.size()) != G.dim()) {
    throw std::invalid_argument(std::string(what) + ": element has " +
                                std::to_string(a.size()) + " coordinates, group needs " +
                                std::to_string(G.dim()));
  }
}

void check_scale(double t, const char* what) {
  if (!(t > 0.0)) {
    throw std::invalid_argument(std::string(what) + ": dilation parameter must be positive, got " +
                                std::to_string(t));
  }
}

}  // namespace

GroupDescriptor GroupDescriptor::euclidean(int n) {
  if (n < 1) throw std::invalid_argument("euclidean: n must be >= 1");
  return GroupDescriptor{GroupKind::Euclidean, n};
}

GroupDescriptor GroupDescriptor::heisenberg(int n) {
  if (n < 1) throw std::invalid_argument("heisenberg: n must be >= 1");
  return GroupDescriptor{GroupKind::Heisenberg, n};
}

int GroupDescriptor::dim() const {
  return kind == GroupKind::Euclidean ? n : 2 * n + 1;
}

std::vector<int> GroupDescriptor::layers() const {
  if (kind == GroupKind::Euclidean) return {n};
  return {2 * n, 1};
}

int GroupDescriptor::homogeneous_dimension() const {
  const auto ls = layers();
  int k = 0;
  for (std::size_t j = 0; j < ls.size(); ++j) k += static_cast<int>(j + 1) * ls[j];
  return k;
}

std::string GroupDescriptor::to_json() const {
  nlohmann::json j;
  j["kind"] = kind == GroupKind::Euclidean ? "euclidean" : "heisenberg";
  j["n"] = n;
  return j.dump();
}

GroupDescriptor GroupDescriptor::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("kind") || !j.contains("n")) {
    throw std::invalid_argument("group descriptor: missing \"kind\" or \"n\"");
  }
  const std::string kind = j.at("kind").get<std::string>();
  const int n = j.at("n").get<int>();
  if (kind == "euclidean") return euclidean(n);
  if (kind == "heisenberg") return heisenberg(n);
  throw std::invalid_argument("group descriptor: unknown kind \"" + kind + "\"");
}

GroupElement identity(const GroupDescriptor& G) {
  return GroupElement(static_cast<std::size_t>(G.dim()), 0.0);
}

GroupElement compose(const GroupDescriptor& G, const GroupElement& a, const GroupElement& b) {
  check_dim(G, a, "compose");
  check_dim(G, b, "compose");
  GroupElement out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  if (G.kind == GroupKind::Heisenberg) {
    // Coordinates are (s, x_1..x_n, y_1..y_n); the centre picks up the
    // polarised twist (x . y' - x' . y)/2.
    const int n = G.n;
    double twist = 0.0;
    for (int i = 0; i < n; ++i) {
      twist += a[1 + i] * b[1 + n + i] - b[1 + i] * a[1 + n + i];
    }
    out[0] += 0.5 * twist;
  }
  return out;
}

GroupElement inverse(const GroupDescriptor& G, const GroupElement& a) {
  check_dim(G, a, "inverse");
  // In exponential coordinates of a two-step group the inverse is plain
  // negation: the twist cancels because (x,y) and (-x,-y) commute up to a
  // symmetric term that vanishes.
  GroupElement out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
  return out;
}

GroupElement dilate(const GroupDescriptor& G, double t, const GroupElement& a) {
  check_dim(G, a, "dilate");
  check_scale(t, "dilate");
  GroupElement out(a.size());
  if (G.kind == GroupKind::Euclidean) {
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = t * a[i];
  } else {
    out[0] = t * t * a[0];
    for (std::size_t i = 1; i < a.size(); ++i) out[i] = t * a[i];
  }
  return out;
}

ScaledElement scaled_compose(const GroupDescriptor& G, const ScaledElement& a,
                             const ScaledElement& b) {
  check_scale(a.t, "scaled_compose");
  check_scale(b.t, "scaled_compose");
  return ScaledElement{a.t * b.t, compose(G, a.g, dilate(G, a.t, b.g))};
}

ScaledElement scaled_inverse(const GroupDescriptor& G, const ScaledElement& a) {
  check_scale(a.t, "scaled_inverse");
  return ScaledElement{1.0 / a.t, dilate(G, 1.0 / a.t, inverse(G, a.g))};
}

GroupElement scaled_action(const GroupDescriptor& G, const ScaledElement& s,
                           const GroupElement& x) {
  check_scale(s.t, "scaled_action");
  return compose(G, s.g, dilate(G, s.t, x));
}

}  // namespace localis
