// Snapshot files: a JSON sidecar header next to raw little-endian float64
// data, field order (c+, u+_1..u+_N, c-, u-_1..u-_N), row-major with the
// last axis fastest.
#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "twofluid/params.hpp"
#include "twofluid/solver.hpp"

namespace twofluid {

inline void write_raw(const std::string& path, const RealField& f,
                      std::ofstream& out) {
  (void)path;
  out.write(reinterpret_cast<const char*>(f.data()),
            static_cast<std::streamsize>(f.size() * sizeof(double)));
}

// Writes `base`.bin and `base`.json.
inline void write_snapshot(const std::string& base, const FieldState& st,
                           const ModelParams& params) {
  nlohmann::json header;
  header["format"] = "twofluid-snapshot-v1";
  header["endianness"] = "little";
  header["scalar"] = "float64";
  header["dim"] = st.grid.dim;
  header["n"] = st.grid.n;
  header["L"] = st.grid.L;
  header["time"] = st.time;
  header["layout"] = "row-major, last axis fastest";
  nlohmann::json fields = nlohmann::json::array();
  fields.push_back("c_plus");
  for (int a = 0; a < st.grid.dim; ++a)
    fields.push_back("u_plus_" + std::to_string(a));
  fields.push_back("c_minus");
  for (int a = 0; a < st.grid.dim; ++a)
    fields.push_back("u_minus_" + std::to_string(a));
  header["fields"] = fields;
  header["params"] = {{"gamma_plus", params.gamma_plus},
                      {"gamma_minus", params.gamma_minus},
                      {"mu_plus", params.mu_plus},
                      {"mu_minus", params.mu_minus},
                      {"lambda_plus", params.lambda_plus},
                      {"lambda_minus", params.lambda_minus}};

  std::ofstream js(base + ".json");
  if (!js) throw std::runtime_error("write_snapshot: cannot open " + base + ".json");
  js << header.dump(2) << "\n";

  std::ofstream bin(base + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("write_snapshot: cannot open " + base + ".bin");
  write_raw(base, st.c_plus, bin);
  for (int a = 0; a < st.grid.dim; ++a) write_raw(base, st.u_plus[a], bin);
  write_raw(base, st.c_minus, bin);
  for (int a = 0; a < st.grid.dim; ++a) write_raw(base, st.u_minus[a], bin);
}

// Reads `base`.json + `base`.bin (the ".json" suffix may be included).
inline std::pair<FieldState, ModelParams> read_snapshot(std::string base) {
  if (base.size() > 5 && base.substr(base.size() - 5) == ".json")
    base = base.substr(0, base.size() - 5);
  std::ifstream js(base + ".json");
  if (!js) throw std::runtime_error("read_snapshot: cannot open " + base + ".json");
  nlohmann::json header = nlohmann::json::parse(js);

  FieldState st;
  st.grid = PeriodicGrid(header.at("dim").get<int>(), header.at("n").get<int>(),
                         header.at("L").get<double>());
  st.time = header.value("time", 0.0);
  ModelParams params;
  params.dim = st.grid.dim;
  const auto& p = header.at("params");
  params.gamma_plus = p.at("gamma_plus").get<double>();
  params.gamma_minus = p.at("gamma_minus").get<double>();
  params.mu_plus = p.at("mu_plus").get<double>();
  params.mu_minus = p.at("mu_minus").get<double>();
  params.lambda_plus = p.at("lambda_plus").get<double>();
  params.lambda_minus = p.at("lambda_minus").get<double>();

  std::ifstream bin(base + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("read_snapshot: cannot open " + base + ".bin");
  const std::size_t sz = st.grid.size();
  auto read_field = [&](RealField& f) {
    f.resize(sz);
    bin.read(reinterpret_cast<char*>(f.data()),
             static_cast<std::streamsize>(sz * sizeof(double)));
    if (!bin) throw std::runtime_error("read_snapshot: truncated " + base + ".bin");
  };
  read_field(st.c_plus);
  for (int a = 0; a < st.grid.dim; ++a) read_field(st.u_plus[a]);
  read_field(st.c_minus);
  for (int a = 0; a < st.grid.dim; ++a) read_field(st.u_minus[a]);
  return {st, params};
}

}  // namespace twofluid
