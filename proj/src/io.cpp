#include <wavemap/io.hpp>

#include <json.hpp>

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wavemap {

std::string format_double(double x) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), end);
}

void write_snapshot(const std::filesystem::path& stem, const FieldState& state) {
  auto csv_path = stem;
  csv_path += ".csv";
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
  csv << "r,psi,psidot\n";
  for (std::size_t i = 0; i < state.size(); ++i)
    csv << format_double(state.r(i)) << ',' << format_double(state.psi[i]) << ','
        << format_double(state.psidot[i]) << '\n';

  nlohmann::ordered_json meta;
  meta["t"] = state.t;
  meta["ell"] = state.ell;
  meta["target"] = state.target.name();
  meta["r_max"] = state.grid->r_max();
  meta["n_nodes"] = state.size();
  auto json_path = stem;
  json_path += ".json";
  std::ofstream js(json_path);
  if (!js) throw std::runtime_error("cannot write " + json_path.string());
  js << meta.dump(2) << '\n';
}

FieldState read_snapshot(const std::filesystem::path& stem, const TargetGeometry* custom_target) {
  auto json_path = stem;
  json_path += ".json";
  std::ifstream js(json_path);
  if (!js) throw std::runtime_error("cannot read " + json_path.string());
  const auto meta = nlohmann::json::parse(js);

  auto csv_path = stem;
  csv_path += ".csv";
  std::ifstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot read " + csv_path.string());
  std::string line;
  std::getline(csv, line);
  if (line != "r,psi,psidot") throw std::runtime_error("snapshot: bad header in " + csv_path.string());
  std::vector<double> r, psi, psidot;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    std::getline(row, a, ',');
    std::getline(row, b, ',');
    std::getline(row, c, ',');
    r.push_back(std::stod(a));
    psi.push_back(std::stod(b));
    psidot.push_back(std::stod(c));
  }
  if (r.size() != meta.at("n_nodes").get<std::size_t>())
    throw std::runtime_error("snapshot: row count does not match sidecar");

  FieldState s;
  s.grid = share(RadialGrid::from_nodes(std::move(r)));
  s.psi = std::move(psi);
  s.psidot = std::move(psidot);
  s.t = meta.at("t").get<double>();
  s.ell = meta.at("ell").get<int>();
  const auto name = meta.at("target").get<std::string>();
  if (name == "custom") {
    if (!custom_target) throw std::runtime_error("snapshot: custom target must be supplied");
    s.target = *custom_target;
  } else {
    s.target = TargetGeometry::from_name(name);
  }
  s.validate();
  return s;
}

} // namespace wavemap
