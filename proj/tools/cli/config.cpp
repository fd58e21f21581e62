#include "cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <sstream>

namespace liouville::cli {

namespace {

double parse_real(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("bad number for " + what + ": '" + text + "'");
  }
}

int parse_count(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("bad count for " + what + ": '" + text + "'");
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

Pairing parse_pairing(const std::string& text) {
  if (text == "cross") return Pairing::cross;
  if (text == "same-index") return Pairing::same_index;
  throw InvalidArgument("pairing must be 'cross' or 'same-index'");
}

}  // namespace

std::tuple<double, double, int> parse_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw InvalidArgument("expected lo:hi:n, got '" + text + "'");
  return {parse_real(trim(parts[0]), "range"), parse_real(trim(parts[1]), "range"),
          parse_count(trim(parts[2]), "range")};
}

Interval parse_interval(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw InvalidArgument("expected lo:hi, got '" + text + "'");
  Interval iv{parse_real(trim(parts[0]), "interval"), parse_real(trim(parts[1]), "interval")};
  if (!(iv.hi >= iv.lo)) throw InvalidArgument("interval '" + text + "' is reversed");
  return iv;
}

SpacetimeGrid parse_grid(const std::string& text) {
  const auto axes = split(text, ',');
  if (axes.size() != 2) throw InvalidArgument("expected tmin:tmax:nt,xmin:xmax:nx, got '" + text + "'");
  SpacetimeGrid g;
  std::tie(g.t_min, g.t_max, g.nt) = parse_range(axes[0]);
  std::tie(g.x_min, g.x_max, g.nx) = parse_range(axes[1]);
  return g;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_real(trim(part), "list"));
  return out;
}

void RunConfig::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidArgument("mass must be positive");
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("ODE step h must be positive");
  if (!(margin >= 0.0)) throw InvalidArgument("margin must be non-negative");
  if (!std::isfinite(x0)) throw InvalidArgument("base point must be finite");
  for (double tol : {tolerances.wronskian_drift, tolerances.residual, tolerances.newton})
    if (!(tol > 0.0)) throw InvalidArgument("tolerances must be positive");
  grid.validate();
  (void)required_chiral_range();
}

Interval RunConfig::required_chiral_range() const {
  const Interval hull = grid.chiral_hull(x0);
  if (chiral_range && !chiral_range->contains(hull)) {
    std::ostringstream msg;
    msg << "grid needs chiral range [" << hull.lo << ", " << hull.hi << "] but only ["
        << chiral_range->lo << ", " << chiral_range->hi << "] is allowed";
    throw InvalidArgument(msg.str());
  }
  return hull;
}

CauchyData RunConfig::load_data() const {
  if (data_file) {
    CauchyData d = CauchyData::read_csv(*data_file);
    const Interval need = required_chiral_range();
    const Interval padded{need.lo - margin, need.hi + margin};
    if (!d.support().contains(padded)) {
      std::ostringstream msg;
      msg << "data file covers [" << d.support().lo << ", " << d.support().hi
          << "] but the grid needs [" << padded.lo << ", " << padded.hi << "]";
      throw InvalidArgument(msg.str());
    }
    return d;
  }
  return CauchyData::from_expressions(phi, pi, {{"m", mass}});
}

SolveOptions RunConfig::solve_options() const {
  SolveOptions o;
  o.x0 = x0;
  o.h = h;
  o.margin = margin;
  o.drift_tolerance = tolerances.wronskian_drift;
  o.pairing = pairing;
  return o;
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["m"] = mass;
  if (data_file) {
    j["data_file"] = data_file->string();
  } else {
    j["phi"] = phi;
    j["pi"] = pi;
  }
  j["x0"] = x0;
  j["h"] = h;
  j["margin"] = margin;
  if (chiral_range) j["chiral_range"] = {chiral_range->lo, chiral_range->hi};
  j["grid"] = {{"t_min", grid.t_min}, {"t_max", grid.t_max}, {"nt", grid.nt},
               {"x_min", grid.x_min}, {"x_max", grid.x_max}, {"nx", grid.nx}};
  j["tolerances"] = {{"wronskian_drift", tolerances.wronskian_drift},
                     {"residual", tolerances.residual},
                     {"newton", tolerances.newton}};
  j["seed"] = seed;
  j["pairing"] = pairing == Pairing::cross ? "cross" : "same-index";
  return j;
}

void apply_config_file(const std::filesystem::path& path, RunConfig& config) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InvalidArgument("config file: " + std::string(e.what()));
  }

  static const std::map<std::string, std::vector<std::string>> known{
      {"data", {"m", "phi", "pi", "data_file", "x0"}},
      {"solver", {"h", "margin", "chiral_range", "pairing"}},
      {"grid", {"grid", "t", "x"}},
      {"tolerances", {"wronskian_drift", "residual", "newton"}},
      {"run", {"seed", "out"}},
  };
  for (const auto& [section, entries] : tree) {
    auto it = known.find(section);
    if (it == known.end()) throw InvalidArgument("config file: unknown section [" + section + "]");
    for (const auto& [key, value] : entries) {
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw InvalidArgument("config file: unknown key '" + key + "' in [" + section + "]");
    }
  }

  auto get = [&](const char* key) { return tree.get_optional<std::string>(key); };
  if (auto v = get("data.m")) config.mass = parse_real(*v, "m");
  if (auto v = get("data.phi")) config.phi = *v;
  if (auto v = get("data.pi")) config.pi = *v;
  if (auto v = get("data.data_file")) config.data_file = *v;
  if (auto v = get("data.x0")) config.x0 = parse_real(*v, "x0");
  if (auto v = get("solver.h")) config.h = parse_real(*v, "h");
  if (auto v = get("solver.margin")) config.margin = parse_real(*v, "margin");
  if (auto v = get("solver.chiral_range")) config.chiral_range = parse_interval(*v);
  if (auto v = get("solver.pairing")) config.pairing = parse_pairing(*v);
  if (auto v = get("grid.grid")) config.grid = parse_grid(*v);
  if (auto v = get("grid.t"))
    std::tie(config.grid.t_min, config.grid.t_max, config.grid.nt) = parse_range(*v);
  if (auto v = get("grid.x"))
    std::tie(config.grid.x_min, config.grid.x_max, config.grid.nx) = parse_range(*v);
  if (auto v = get("tolerances.wronskian_drift"))
    config.tolerances.wronskian_drift = parse_real(*v, "wronskian_drift");
  if (auto v = get("tolerances.residual")) config.tolerances.residual = parse_real(*v, "residual");
  if (auto v = get("tolerances.newton")) config.tolerances.newton = parse_real(*v, "newton");
  if (auto v = get("run.seed")) config.seed = static_cast<std::uint64_t>(parse_count(*v, "seed"));
  if (auto v = get("run.out")) config.out = *v;
}

void apply_overrides(const Overrides& flags, RunConfig& config) {
  // Output first, so a failing config still leaves its manifest where asked.
  if (flags.out) config.out = *flags.out;
  if (flags.config) apply_config_file(*flags.config, config);
  if (flags.mass) config.mass = *flags.mass;
  if (flags.phi) config.phi = *flags.phi;
  if (flags.pi) config.pi = *flags.pi;
  if (flags.data_file) config.data_file = *flags.data_file;
  if (flags.x0) config.x0 = *flags.x0;
  if (flags.h) config.h = *flags.h;
  if (flags.margin) config.margin = *flags.margin;
  if (flags.chiral_range) config.chiral_range = parse_interval(*flags.chiral_range);
  if (flags.grid) config.grid = parse_grid(*flags.grid);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.out) config.out = *flags.out;
  if (flags.pairing) config.pairing = parse_pairing(*flags.pairing);
}

}  // namespace liouville::cli
