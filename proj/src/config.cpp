#include "scvx/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"

namespace scvx {

namespace {

using json = nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError(key + ": " + what, key);
}

// Rewrites {"a.b": 1} as {"a": {"b": 1}} at every level.
json expand_dotted(const json& in, const std::string& path) {
  if (!in.is_object()) return in;
  json out = json::object();
  for (auto it = in.begin(); it != in.end(); ++it) {
    std::vector<std::string> parts;
    std::stringstream ss(it.key());
    for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
    if (parts.empty()) parts.push_back("");
    json* node = &out;
    std::string where = path;
    for (std::size_t n = 0; n + 1 < parts.size(); ++n) {
      where = join(where, parts[n]);
      json& next = (*node)[parts[n]];
      if (next.is_null()) next = json::object();
      if (!next.is_object()) fail(where, "used both as a value and as a section");
      node = &next;
    }
    where = join(where, parts.back());
    json value = expand_dotted(it.value(), where);
    json& slot = (*node)[parts.back()];
    if (slot.is_object() && value.is_object()) {
      for (auto v = value.begin(); v != value.end(); ++v) {
        if (slot.contains(v.key())) fail(join(where, v.key()), "given twice");
        slot[v.key()] = v.value();
      }
    } else if (!slot.is_null()) {
      fail(where, "given twice");
    } else {
      slot = std::move(value);
    }
  }
  return out;
}

enum class Sign { any, positive, nonnegative };

class Section {
 public:
  Section(const json* node, std::string path, std::vector<std::string>* warnings)
      : node_(node), path_(std::move(path)), warnings_(warnings) {
    if (node_ != nullptr && !node_->is_object()) fail(path_, "expected an object");
  }
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;
  ~Section() {
    if (node_ == nullptr) return;
    for (auto it = node_->begin(); it != node_->end(); ++it) {
      if (!seen_.count(it.key())) warnings_->push_back("unknown key '" + key(it.key()) + "' ignored");
    }
  }

  std::string key(const std::string& k) const { return join(path_, k); }

  const json* find(const std::string& k) {
    seen_.insert(k);
    if (node_ == nullptr) return nullptr;
    auto it = node_->find(k);
    return it == node_->end() || it->is_null() ? nullptr : &*it;
  }

  Section child(const std::string& k) { return Section(find(k), key(k), warnings_); }

  void number(const std::string& k, double& out, Sign sign = Sign::any) {
    if (const json* v = find(k)) out = as_number(*v, key(k), sign);
  }

  void integer(const std::string& k, int& out, int min_value) {
    const json* v = find(k);
    if (v == nullptr) return;
    if (!v->is_number_integer()) fail(key(k), "expected an integer");
    const auto x = v->get<long long>();
    if (x < min_value) fail(key(k), "must be >= " + std::to_string(min_value));
    if (x > 1000000000LL) fail(key(k), "out of range");
    out = static_cast<int>(x);
  }

  void boolean(const std::string& k, bool& out) {
    if (const json* v = find(k)) {
      if (!v->is_boolean()) fail(key(k), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& k, std::string& out) {
    if (const json* v = find(k)) {
      if (!v->is_string()) fail(key(k), "expected a string");
      out = v->get<std::string>();
    }
  }

  void vec3(const std::string& k, Vec3& out) {
    if (const json* v = find(k)) out = as_vector<3>(*v, key(k));
  }

  void optional_vec3(const std::string& k, std::optional<Vec3>& out) {
    if (const json* v = find(k)) out = as_vector<3>(*v, key(k));
  }

  void quaternion(const std::string& k, UnitQuaternion& out) {
    if (const json* v = find(k)) out = as_quaternion(*v, key(k));
  }

  void optional_quaternion(const std::string& k, std::optional<UnitQuaternion>& out) {
    if (const json* v = find(k)) out = as_quaternion(*v, key(k));
  }

  static double as_number(const json& v, const std::string& where, Sign sign) {
    if (!v.is_number()) fail(where, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(where, "must be finite");
    if (sign == Sign::positive && !(x > 0.0)) fail(where, "must be > 0");
    if (sign == Sign::nonnegative && !(x >= 0.0)) fail(where, "must be >= 0");
    return x;
  }

  template <int n>
  static Eigen::Matrix<double, n, 1> as_vector(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != static_cast<std::size_t>(n)) {
      fail(where, "expected an array of " + std::to_string(n) + " numbers");
    }
    Eigen::Matrix<double, n, 1> out;
    for (int i = 0; i < n; ++i) {
      out[i] = as_number(v[static_cast<std::size_t>(i)], where + "[" + std::to_string(i) + "]",
                         Sign::any);
    }
    return out;
  }

  UnitQuaternion as_quaternion(const json& v, const std::string& where) {
    const Vec4 c = as_vector<4>(v, where);
    const double norm = c.norm();
    if (!(norm > 0.0)) fail(where, "quaternion must be nonzero");
    if (std::abs(norm - 1.0) > 1e-6) {
      warnings_->push_back(where + ": quaternion normalized (norm was " + std::to_string(norm) + ")");
    }
    return UnitQuaternion(c);
  }

  std::vector<std::string>& warnings() { return *warnings_; }

 private:
  const json* node_;
  std::string path_;
  std::vector<std::string>* warnings_;
  std::set<std::string> seen_;
};

void read_state(Section s, ChaserState& st) {
  s.vec3("p", st.p);
  s.vec3("v", st.v);
  s.quaternion("q", st.q);
  s.vec3("w", st.w);
}

void read_mission(Section s, MissionSpec& m) {
  s.number("t_f", m.t_f, Sign::positive);
  s.number("r_a", m.r_a, Sign::positive);
  s.number("dtheta_max_deg", m.dtheta_max_deg, Sign::positive);
  s.number("gamma_deg", m.gamma_deg, Sign::positive);
  read_state(s.child("initial"), m.initial);
  read_state(s.child("lm"), m.lm);

  Section d = s.child("docking");
  DockingGeometry& g = m.docking;
  d.number("port_offset", g.port_offset);
  d.number("nose_length", g.nose_length);
  d.number("closure_speed", g.closure_speed);
  d.number("docking_yaw_deg", g.docking_yaw_deg);
  d.number("docking_roll_deg", g.docking_roll_deg);
  d.optional_vec3("e_d", g.e_d);
  d.optional_vec3("p_d", g.p_d);
  d.optional_vec3("p_f", g.p_f);
  d.optional_vec3("v_f", g.v_f);
  d.optional_quaternion("q_f", g.q_f);
  d.optional_vec3("w_f", g.w_f);
  if (g.e_d && !(g.e_d->norm() > 0.0)) fail(d.key("e_d"), "must be nonzero");
}

void read_vehicle(Section s, ApolloGeometry& g) {
  s.number("mass", g.mass, Sign::positive);
  if (const json* v = s.find("inertia")) {
    const std::string where = s.key("inertia");
    if (v->is_array() && v->size() == 3 && (*v)[0].is_number()) {
      g.inertia = Section::as_vector<3>(*v, where).asDiagonal();
    } else if (v->is_array() && v->size() == 3) {
      for (int r = 0; r < 3; ++r) {
        g.inertia.row(r) = Section::as_vector<3>((*v)[static_cast<std::size_t>(r)],
                                                 where + "[" + std::to_string(r) + "]")
                               .transpose();
      }
    } else {
      fail(where, "expected 3 diagonal entries or a 3x3 array");
    }
  }
  s.number("thrust", g.thrust, Sign::positive);
  s.number("ring_radius", g.ring_radius, Sign::nonnegative);
  s.number("quad_station", g.quad_station);
  s.number("quad_offset_deg", g.quad_offset_deg);
  s.number("cant_deg", g.cant_deg);
  s.number("roll_offset", g.roll_offset);
  s.boolean("apply_roll_offset", g.apply_roll_offset);
  s.number("dt_min", g.dt_min, Sign::positive);
  s.number("dt_max", g.dt_max, Sign::positive);
  s.number("t_c", g.t_c, Sign::positive);
  if (const json* v = s.find("forward_set")) {
    const std::string where = s.key("forward_set");
    if (!v->is_array()) fail(where, "expected an array of thruster labels");
    g.forward_set.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number_integer()) fail(where + "[" + std::to_string(i) + "]", "expected an integer");
      g.forward_set.push_back((*v)[i].get<int>());
    }
  }
  if (g.dt_max <= g.dt_min) fail(s.key("dt_max"), "must exceed dt_min");
  if (g.t_c < g.dt_max) fail(s.key("t_c"), "must be >= dt_max");
}

void read_scvx(Section s, ScvxConfig& c) {
  s.number("w_tr", c.w_tr, Sign::positive);
  s.number("w_vc", c.w_vc, Sign::positive);
  s.integer("j_max", c.j_max, 1);
  s.number("dJ_tol", c.dJ_tol, Sign::nonnegative);
  s.number("cost_abs_tol", c.cost_abs_tol, Sign::nonnegative);
  s.number("pulse_zero_tol", c.pulse_zero_tol, Sign::nonnegative);
  s.number("mib_tol", c.mib_tol, Sign::nonnegative);
  s.boolean("min_pulse_warmup", c.min_pulse_warmup);
  s.number("warmup_eta_tol", c.warmup_eta_tol, Sign::nonnegative);
  s.number("w_tr_growth", c.w_tr_growth, Sign::positive);
  s.number("w_tr_growth_cap", c.w_tr_growth_cap, Sign::positive);
  bool parallel = c.exec == Execution::parallel;
  s.boolean("parallel", parallel);
  c.exec = parallel ? Execution::parallel : Execution::serial;
  if (c.w_tr_growth < 1.0) fail(s.key("w_tr_growth"), "must be >= 1");
  if (c.w_tr_growth_cap < 1.0) fail(s.key("w_tr_growth_cap"), "must be >= 1");

  Section t = s.child("tol");
  t.number("p", c.tol.p, Sign::positive);
  t.number("v", c.tol.v, Sign::positive);
  t.number("theta_deg", c.tol.theta, Sign::positive);
  t.number("w_deg", c.tol.w, Sign::positive);

  Section in = s.child("integrator");
  in.number("rel", c.integrator.rel, Sign::positive);
  in.number("abs", c.integrator.abs, Sign::positive);
}

void read_solver(Section s, std::string& name, SolverSettings& st) {
  s.string("name", name);
  s.number("feastol", st.feastol, Sign::positive);
  s.number("abstol", st.abstol, Sign::positive);
  s.number("reltol", st.reltol, Sign::positive);
  s.number("feastol_inacc", st.feastol_inacc, Sign::positive);
  s.number("abstol_inacc", st.abstol_inacc, Sign::positive);
  s.number("reltol_inacc", st.reltol_inacc, Sign::positive);
  s.integer("max_iters", st.max_iters, 1);
  s.integer("ruiz_passes", st.ruiz_passes, 0);
  s.number("static_reg", st.static_reg, Sign::nonnegative);
  s.integer("refine_steps", st.refine_steps, 0);
  s.boolean("verbose", st.verbose);
}

void read_root(const json& doc, RunConfig& rc) {
  Section root(&doc, "", &rc.warnings);
  read_mission(root.child("mission"), rc.mission);
  read_vehicle(root.child("vehicle"), rc.vehicle);
  read_scvx(root.child("scvx"), rc.scvx);
  read_solver(root.child("solver"), rc.solver, rc.solver_settings);

  {
    Section f = root.child("fuel");
    f.number("c1", rc.c1, Sign::positive);
    std::string model = to_string(rc.fuel_model);
    f.string("model", model);
    if (model == "squared") {
      rc.fuel_model = FuelModel::squared;
    } else if (model == "linear") {
      rc.fuel_model = FuelModel::linear;
    } else {
      fail(f.key("model"), "expected \"squared\" or \"linear\"");
    }
  }

  if (const json* v = root.find("sweep")) {
    if (!v->is_array() || v->empty()) fail("sweep", "expected a nonempty array of final times");
    rc.sweep.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      rc.sweep.push_back(
          Section::as_number((*v)[i], "sweep[" + std::to_string(i) + "]", Sign::positive));
    }
  }
  std::string out = rc.output_dir.string();
  root.string("output_dir", out);
  if (out.empty()) fail("output_dir", "must not be empty");
  rc.output_dir = out;
  root.integer("dense_samples", rc.dense_samples, 1);
  if (const json* v = root.find("seed")) {
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
      fail("seed", "expected a nonnegative integer");
    }
    rc.seed = v->get<std::uint64_t>();
  }
}

bool multiple_of(double t, double step) {
  const double r = t / step;
  return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r) && std::round(r) >= 1.0;
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1;
  int column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

VehicleModel RunConfig::build_vehicle() const {
  try {
    return build_apollo_csm(vehicle);
  } catch (const InvalidVehicle& e) {
    const std::string msg = e.what();
    std::string key = "vehicle";
    if (msg.find("mass") != std::string::npos) key = "vehicle.mass";
    else if (msg.find("inertia") != std::string::npos) key = "vehicle.inertia";
    else if (msg.find("forward set") != std::string::npos) key = "vehicle.forward_set";
    else if (msg.find("dt_min") != std::string::npos) key = "vehicle.dt_min";
    else if (msg.find("dt_max") != std::string::npos) key = "vehicle.dt_max";
    else if (msg.find("thrust") != std::string::npos) key = "vehicle.thrust";
    throw ConfigError(key + ": " + msg, key);
  }
}

RendezvousProblem RunConfig::build_problem(double t_f) const {
  const VehicleModel v = build_vehicle();
  if (!multiple_of(t_f, v.t_c())) {
    std::ostringstream os;
    os << "mission.t_f: " << t_f << " s is not a positive multiple of t_c = " << v.t_c() << " s";
    throw ConfigError(os.str(), "mission.t_f");
  }
  MissionSpec m = mission;
  m.t_f = t_f;
  try {
    return make_problem(m, v);
  } catch (const InvalidProblem& e) {
    const std::string msg = e.what();
    std::string key = "mission";
    if (msg.find("|e_d|") != std::string::npos) key = "mission.docking.e_d";
    else if (msg.find("r_a") != std::string::npos) key = "mission.r_a";
    else if (msg.find("dtheta_max") != std::string::npos) key = "mission.dtheta_max_deg";
    else if (msg.find("gamma") != std::string::npos) key = "mission.gamma_deg";
    throw ConfigError(key + ": " + msg, key);
  }
}

void RunConfig::validate() const {
  const VehicleModel v = build_vehicle();
  build_problem(mission.t_f);
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    if (!multiple_of(sweep[i], v.t_c())) {
      std::ostringstream os;
      const std::string key = "sweep[" + std::to_string(i) + "]";
      os << key << ": " << sweep[i] << " s is not a positive multiple of t_c = " << v.t_c() << " s";
      throw ConfigError(os.str(), key);
    }
  }
  try {
    scvx.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scvx: ") + e.what(), "scvx");
  }
  try {
    make_solver(solver, solver_settings);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("solver.name: ") + e.what(), "solver.name");
  }
}

RunConfig parse_config(const std::string& text) {
  json doc;
  bool blank = true;
  for (char ch : text) blank = blank && std::isspace(static_cast<unsigned char>(ch));
  if (blank) {
    doc = json::object();
  } else {
    try {
      doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
      const auto [line, col] = line_column(text, e.byte);
      std::string what = e.what();
      if (auto pos = what.find("parse error"); pos != std::string::npos) {
        const auto colon = what.find(": ", pos);
        what = colon == std::string::npos ? what.substr(pos) : what.substr(colon + 2);
      }
      throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                            ": " + what,
                        "", line, col);
    }
  }
  if (!doc.is_object()) throw ConfigError("top level must be an object", "", 1, 1);
  RunConfig rc;
  read_root(expand_dotted(doc, ""), rc);
  rc.validate();
  return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'", "");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace scvx
