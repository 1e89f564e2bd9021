#include "keplink/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "keplink/errors.hpp"

namespace keplink {

namespace {

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const Json& j) {
  if (!j.is_array() || j.size() != 3) fail(ErrorKind::Input, "expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json state_json(const CartesianState& s) {
  return {{"epoch_mjd", s.epoch}, {"r", vec_json(s.r)}, {"rdot", vec_json(s.rdot)}};
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double to_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::Input, where + ": not a number: '" + s + "'");
  }
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path, std::size_t min_cols, std::size_t max_cols) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::Input, "cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (lineno == 1 && !cells.empty() && !std::isdigit(static_cast<unsigned char>(cells[0][0])) &&
        cells[0][0] != '-' && cells[0][0] != '+' && cells[0][0] != '.')
      continue;  // header
    if (cells.size() < min_cols || cells.size() > max_cols)
      fail(ErrorKind::Input, path + ":" + std::to_string(lineno) + ": unexpected column count");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(to_double(c, path + ":" + std::to_string(lineno)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorKind::Input, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    fail(ErrorKind::Input, std::string("bad field '") + key + "': " + e.what());
  }
}

double angle_field(const Json& j, const std::string& key) {
  if (j.contains(key + "_deg")) return field<double>(j, (key + "_deg").c_str()) * kDeg;
  return field<double>(j, key.c_str());
}

}  // namespace

OpticalAttributable AttributableRecord::optical() const {
  if (kind != "optical") fail(ErrorKind::Input, "expected an optical attributable, got '" + kind + "'");
  return {values(0), values(1), values(2), values(3), tbar, cov, station};
}

RadarAttributable AttributableRecord::radar() const {
  if (kind != "radar") fail(ErrorKind::Input, "expected a radar attributable, got '" + kind + "'");
  if (!(values(2) > 0.0)) fail(ErrorKind::Input, "radar attributable: rho must be positive");
  return {values(0), values(1), values(2), values(3), tbar, cov, station};
}

AttributableRecord AttributableRecord::from(const OpticalAttributable& a, const std::string& units) {
  AttributableRecord r;
  r.kind = "optical";
  r.tbar = a.tbar;
  r.values = a.values();
  r.cov = a.cov;
  r.station = a.station;
  r.units = units;
  return r;
}

AttributableRecord AttributableRecord::from(const RadarAttributable& a, const std::string& units) {
  AttributableRecord r;
  r.kind = "radar";
  r.tbar = a.tbar;
  r.values = a.values();
  r.cov = a.cov;
  r.station = a.station;
  r.units = units;
  return r;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) a.push_back(m(i, k));
  return a;
}

Eigen::MatrixXd matrix_from_json(const Json& j, int rows, int cols) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(rows * cols))
    fail(ErrorKind::Input, "expected a flat array of " + std::to_string(rows * cols) + " numbers");
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) m(i, k) = j[static_cast<std::size_t>(i * cols + k)].get<double>();
  return m;
}

Json to_json(const ObserverState& obs) { return {{"q", vec_json(obs.q)}, {"qdot", vec_json(obs.qdot)}}; }

ObserverState observer_from_json(const Json& j) { return {vec_from(j.at("q")), vec_from(j.at("qdot"))}; }

Json to_json(const AttributableRecord& r) {
  Json j = {{"kind", r.kind},
            {"tbar_mjd", r.tbar},
            {"values", Json::array({r.values(0), r.values(1), r.values(2), r.values(3)})},
            {"cov", matrix_to_json(r.cov)},
            {"station", r.station},
            {"frame", r.frame},
            {"units", r.units}};
  if (r.observer) j["observer"] = to_json(*r.observer);
  return j;
}

AttributableRecord attributable_from_json(const Json& j) {
  AttributableRecord r;
  r.kind = field<std::string>(j, "kind");
  if (r.kind != "optical" && r.kind != "radar") fail(ErrorKind::Input, "unknown attributable kind '" + r.kind + "'");
  r.tbar = field<double>(j, "tbar_mjd");
  const auto vals = field<std::vector<double>>(j, "values");
  if (vals.size() != 4) fail(ErrorKind::Input, "attributable 'values' must have 4 entries");
  r.values = Vec4(vals[0], vals[1], vals[2], vals[3]);
  r.cov = j.contains("cov") ? Mat4(matrix_from_json(j["cov"], 4, 4)) : Mat4::Zero();
  if (!r.cov.isApprox(r.cov.transpose(), 1e-12) && !r.cov.isZero())
    fail(ErrorKind::Input, "attributable covariance is not symmetric");
  if (!(std::abs(r.values(1)) < kPi / 2)) fail(ErrorKind::Input, "attributable declination outside (-pi/2, pi/2)");
  r.values(0) = wrap_pi(r.values(0));
  r.station = j.value("station", "");
  r.frame = j.value("frame", "");
  r.units = j.value("units", "");
  if (j.contains("observer")) r.observer = observer_from_json(j["observer"]);
  return r;
}

std::vector<AttributableRecord> read_attributables(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::Input, "cannot open " + path);
  std::vector<AttributableRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      fail(ErrorKind::Input, path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(attributable_from_json(j));
  }
  if (out.empty()) fail(ErrorKind::Input, path + ": no attributable records");
  return out;
}

void write_attributables(const std::string& path, const std::vector<AttributableRecord>& records) {
  std::string text;
  for (const auto& r : records) text += dump_json(to_json(r)) + "\n";
  write_text_atomic(path, text);
}

TabulatedEphemeris read_ephemeris_csv(const std::string& path, double time_units_per_day) {
  TabulatedEphemeris tab;
  tab.time_units_per_day = time_units_per_day;
  for (const auto& row : read_numeric_csv(path, 7, 7)) {
    if (!tab.mjd.empty() && !(row[0] > tab.mjd.back()))
      fail(ErrorKind::Input, path + ": epochs must be strictly increasing");
    tab.mjd.push_back(row[0]);
    tab.q.emplace_back(row[1], row[2], row[3]);
    tab.qdot.emplace_back(row[4], row[5], row[6]);
  }
  if (tab.mjd.size() < 2) fail(ErrorKind::Input, path + ": at least 2 ephemeris rows required");
  return tab;
}

void write_ephemeris_csv(const std::string& path, const TabulatedEphemeris& tab) {
  std::ostringstream s;
  s.precision(17);
  s << "mjd,qx,qy,qz,vx,vy,vz\n";
  for (std::size_t k = 0; k < tab.mjd.size(); ++k)
    s << tab.mjd[k] << ',' << tab.q[k].x() << ',' << tab.q[k].y() << ',' << tab.q[k].z() << ',' << tab.qdot[k].x()
      << ',' << tab.qdot[k].y() << ',' << tab.qdot[k].z() << '\n';
  write_text_atomic(path, s.str());
}

ObservationArc read_arc_csv(const std::string& path, double sigma_angle, double sigma_rho) {
  ObservationArc arc;
  for (const auto& row : read_numeric_csv(path, 3, 4)) {
    Observation o;
    o.t = row[0];
    o.alpha = row[1] * kDeg;
    o.delta = row[2] * kDeg;
    if (row.size() == 4) o.rho = row[3];
    o.sigma_angle = sigma_angle;
    o.sigma_rho = sigma_rho;
    arc.observations.push_back(o);
  }
  return arc;
}

KeplerianElements elements_from_json(const Json& j) {
  KeplerianElements el;
  el.a = field<double>(j, "a");
  el.e = field<double>(j, "e");
  el.i = angle_field(j, "i");
  el.Omega = angle_field(j, "Omega");
  el.omega = angle_field(j, "omega");
  el.ell = angle_field(j, "M");
  el.epoch = field<double>(j, "epoch_mjd");
  if (!(el.a > 0.0) || !(el.e >= 0.0 && el.e < 1.0)) fail(ErrorKind::Input, "elements must be elliptic (a > 0, 0 <= e < 1)");
  return el;
}

Json to_json(const KeplerianElements& el) {
  return {{"a", el.a},         {"e", el.e}, {"i", el.i}, {"Omega", el.Omega}, {"omega", el.omega},
          {"M", el.ell}, {"epoch_mjd", el.epoch}};
}

Json to_json(const LinkageSolution& s) {
  Json j = {{"kind", s.kind == LinkageKind::Optical ? "optical" : "radar_optical"},
            {"rho1", s.rho1},
            {"rhodot1", s.rhodot1},
            {"rho2", s.rho2},
            {"rhodot2", s.rhodot2},
            {"alphadot1", s.alphadot1},
            {"deltadot1", s.deltadot1},
            {"state1", state_json(s.state1)},
            {"state2", state_json(s.state2)},
            {"elements1", s.elements1 ? to_json(*s.elements1) : Json()},
            {"elements2", s.elements2 ? to_json(*s.elements2) : Json()},
            {"lenz_residual", s.lenz_residual},
            {"compat",
             {{"lenz_line_of_sight", s.compat.lenz_line_of_sight},
              {"mean_anomaly", s.compat.mean_anomaly ? Json(*s.compat.mean_anomaly) : Json()}}},
            {"chi4", s.chi4 ? Json(*s.chi4) : Json()},
            {"accepted", s.accepted},
            {"warnings", s.warnings}};
  if (s.covariance) {
    j["covariance"] = {{"dY_dA", matrix_to_json(s.covariance->dY_dA)},
                       {"gamma_car1", matrix_to_json(s.covariance->gamma_car1)},
                       {"gamma_car2", matrix_to_json(s.covariance->gamma_car2)},
                       {"condition_number", s.covariance->condition_number},
                       {"ill_conditioned", s.covariance->ill_conditioned}};
  } else {
    j["covariance"] = nullptr;
  }
  j["element_covariance1"] = s.element_covariance1 ? matrix_to_json(*s.element_covariance1) : Json();
  return j;
}

Json to_json(const SyntheticTruth& t) {
  return {{"tbar_mjd", t.tbar},
          {"epoch_mjd", t.epoch},
          {"rho", t.rho},
          {"rhodot", t.rhodot},
          {"xi", t.xi},
          {"zeta", t.zeta},
          {"alphadot_deltadot", t.alphadot_deltadot},
          {"state1", state_json(t.state[0])},
          {"state2", state_json(t.state[1])},
          {"elements", to_json(t.elements)}};
}

Json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::Input, "cannot open " + path);
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::Input, path + ": " + e.what());
  }
}

std::string dump_json(const Json& j) { return j.dump(); }

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::Input, "cannot write " + path);
    f << text;
    if (!f) fail(ErrorKind::Input, "write failed for " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::Input, "cannot rename " + tmp + ": " + ec.message());
}

}  // namespace keplink
