#include "annulus/grid.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "annulus/radial.hpp"

namespace annulus {

AnnulusSpec::AnnulusSpec(double inner_radius) : inner_radius_(inner_radius) {
  if (!(inner_radius > 0.0 && inner_radius < 1.0))
    throw ParameterError("R must lie in (0,1)");
  capacity_ = -kTwoPi / std::log(inner_radius);
}

std::string to_string(Spacing spacing) {
  return spacing == Spacing::uniform ? "uniform" : "cosine";
}

Spacing parse_spacing(const std::string& text) {
  if (text == "uniform") return Spacing::uniform;
  if (text == "cosine" || text == "cosine-clustered" || text == "cosine_clustered")
    return Spacing::cosine_clustered;
  throw ParameterError("unknown spacing '" + text + "' (expected uniform or cosine)");
}

PolarGrid::PolarGrid(AnnulusSpec annulus, std::vector<double> radial_nodes, int n_angular,
                     Spacing spacing)
    : annulus_(annulus),
      radial_nodes_(std::move(radial_nodes)),
      n_angular_(n_angular),
      d_theta_(kTwoPi / n_angular),
      spacing_(spacing) {
  if (radial_nodes_.size() < 3) throw ParameterError("n_radial must be >= 3");
  if (n_angular < 8) throw ParameterError("n_angular must be >= 8");
  if (radial_nodes_.front() != annulus_.inner_radius() || radial_nodes_.back() != 1.0)
    throw ParameterError("radial nodes must start at R and end at 1");
  for (std::size_t i = 1; i < radial_nodes_.size(); ++i)
    if (!(radial_nodes_[i] > radial_nodes_[i - 1]))
      throw ParameterError("radial nodes must be strictly increasing");
  radial_weights_.assign(radial_nodes_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < radial_nodes_.size(); ++i) {
    const double h = radial_nodes_[i + 1] - radial_nodes_[i];
    radial_weights_[i] += 0.5 * h;
    radial_weights_[i + 1] += 0.5 * h;
  }
}

PolarGrid make_grid(const AnnulusSpec& annulus, int n_radial, int n_angular, Spacing spacing) {
  if (n_radial < 3) throw ParameterError("n_radial must be >= 3");
  if (n_angular < 8) throw ParameterError("n_angular must be >= 8");
  const double R = annulus.inner_radius();
  std::vector<double> nodes(static_cast<std::size_t>(n_radial));
  const int last = n_radial - 1;
  for (int i = 0; i <= last; ++i) {
    const double s = static_cast<double>(i) / last;
    const double t = spacing == Spacing::uniform ? s : 0.5 * (1.0 - std::cos(kPi * s));
    nodes[static_cast<std::size_t>(i)] = R + (1.0 - R) * t;
  }
  nodes.front() = R;
  nodes.back() = 1.0;
  return PolarGrid(annulus, std::move(nodes), n_angular, spacing);
}

ComplexField::ComplexField(PolarGrid grid, std::vector<Complex> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw ParameterError("field values do not match grid dimensions");
}

ComplexField::ComplexField(PolarGrid grid, Complex constant)
    : grid_(std::move(grid)), values_(grid_.size(), constant) {}

namespace {

std::vector<double> sample_profile_on(const RadialProfile& profile, std::span<const double> r) {
  const auto& nodes = profile.nodes;
  std::vector<double> out(r.size());
  const bool same_nodes =
      nodes.size() == r.size() &&
      std::equal(nodes.begin(), nodes.end(), r.begin(),
                 [](double a, double b) { return std::abs(a - b) <= 1e-14; });
  if (same_nodes) return profile.values;
  if (profile.closed_form) {
    for (std::size_t i = 0; i < r.size(); ++i)
      out[i] = harmonic_value(profile.annulus.inner_radius(), profile.winding, r[i]);
    return out;
  }
  if (nodes.front() > r.front() + 1e-14 || nodes.back() < r.back() - 1e-14)
    throw ParameterError("profile nodes do not cover the grid's radial range");
  // Piecewise-linear resampling.
  std::size_t k = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    while (k + 2 < nodes.size() && nodes[k + 1] < r[i]) ++k;
    const double t = std::clamp((r[i] - nodes[k]) / (nodes[k + 1] - nodes[k]), 0.0, 1.0);
    out[i] = (1.0 - t) * profile.values[k] + t * profile.values[k + 1];
  }
  return out;
}

}  // namespace

ComplexField radial_ansatz(const PolarGrid& grid, const RadialProfile& profile, int winding) {
  if (std::abs(profile.annulus.inner_radius() - grid.annulus().inner_radius()) > 1e-14)
    throw ParameterError("profile annulus does not match grid annulus");
  if (profile.nodes.size() != profile.values.size() || profile.nodes.size() < 2)
    throw ParameterError("malformed radial profile");
  const auto rho = sample_profile_on(profile, grid.radial_nodes());
  const int m = grid.n_angular();
  std::vector<Complex> phase(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    // Reduce the angle modulo 2*pi in integer arithmetic to keep |phase| = 1 exact-ish.
    const long long wrapped = (static_cast<long long>(winding) * j) % m;
    phase[static_cast<std::size_t>(j)] = std::polar(1.0, kTwoPi * static_cast<double>(wrapped) / m);
  }
  std::vector<Complex> values(grid.size());
  for (int i = 0; i < grid.n_radial(); ++i)
    for (int j = 0; j < m; ++j)
      values[grid.index(i, j)] = rho[static_cast<std::size_t>(i)] * phase[static_cast<std::size_t>(j)];
  return ComplexField(grid, std::move(values));
}

void write_field_csv(const ComplexField& field, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot open " + path.string() + " for writing");
  const auto& g = field.grid();
  out << "r,theta,re,im\n";
  for (int i = 0; i < g.n_radial(); ++i)
    for (int j = 0; j < g.n_angular(); ++j) {
      const Complex v = field(i, j);
      out << format_real(g.r(i)) << ',' << format_real(g.theta(j)) << ',' << format_real(v.real())
          << ',' << format_real(v.imag()) << '\n';
    }
}

void write_grid_metadata(const PolarGrid& grid, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["R"] = grid.annulus().inner_radius();
  j["n_radial"] = grid.n_radial();
  j["n_angular"] = grid.n_angular();
  j["spacing"] = to_string(grid.spacing());
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

PolarGrid read_grid_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    return make_grid(AnnulusSpec(j.at("R").get<double>()), j.at("n_radial").get<int>(),
                     j.at("n_angular").get<int>(), parse_spacing(j.at("spacing").get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("malformed grid metadata: " + std::string(e.what()));
  }
}

ComplexField read_field_csv(const PolarGrid& grid, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "r,theta,re,im") throw ParameterError("unexpected field CSV header");
  std::vector<Complex> values;
  values.reserve(grid.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell[4];
    for (auto& c : cell) std::getline(ss, c, ',');
    values.emplace_back(std::stod(cell[2]), std::stod(cell[3]));
  }
  return ComplexField(grid, std::move(values));
}

}  // namespace annulus
