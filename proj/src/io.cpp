#include "presto/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace presto {

namespace {

std::string fmt(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

Json array_to_json(const Array& a) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < a.size(); ++i) j.push_back(a[i]);
  return j;
}

Array array_from_json(const Json& j, int expected, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != expected)
    throw Error(ErrorCode::ParseError,
                std::string(what) + " must be an array of length " + std::to_string(expected));
  Array out(expected);
  for (int i = 0; i < expected; ++i) out[i] = j[i].get<double>();
  return out;
}

const char* decision_name(StopDecision d) {
  switch (d) {
    case StopDecision::StopAtLeft: return "left";
    case StopDecision::StopAtValue: return "value";
    case StopDecision::Continue: return "continue";
  }
  return "continue";
}

StopDecision decision_from_name(const std::string& name) {
  if (name == "left") return StopDecision::StopAtLeft;
  if (name == "value") return StopDecision::StopAtValue;
  if (name == "continue") return StopDecision::Continue;
  throw Error(ErrorCode::ParseError, "unknown stop decision '" + name + "'");
}

}  // namespace

Json tree_to_json(const FiltrationTree& tree) {
  Json stages = Json::array();
  for (int k = 1; k <= tree.n_stages(); ++k) {
    Json pres = Json::array();
    for (int i = 0; i < tree.n_pre(k); ++i) {
      const PreNode& node = tree.pre(k, i);
      Json marks = Json::array();
      auto [b, e] = tree.post_children(k, i);
      for (int c = b; c < e; ++c)
        marks.push_back({{"mark", tree.post(k, c).mark}, {"q", tree.post(k, c).q}});
      pres.push_back(
          {{"parent", node.parent}, {"dW", node.dw}, {"p", node.p}, {"marks", marks}});
    }
    stages.push_back({{"pre", pres}});
  }
  return Json{{"version", 1}, {"dt", tree.dt()}, {"stages", stages}};
}

FiltrationTree tree_from_json(const Json& j) {
  try {
    if (j.at("version").get<int>() != 1)
      throw Error(ErrorCode::ParseError, "unsupported model version");
    const double dt = j.at("dt").get<double>();
    const auto& stages = j.at("stages");
    const int n = static_cast<int>(stages.size());
    if (n < 1) throw Error(ErrorCode::ParseError, "model needs at least one stage");
    std::vector<std::vector<PreNode>> pre(n + 1);
    std::vector<std::vector<PostNode>> post(n + 1);
    post[0].push_back(PostNode{-1, "", 1.0});
    for (int k = 1; k <= n; ++k) {
      for (const auto& node : stages[k - 1].at("pre")) {
        pre[k].push_back(PreNode{node.at("parent").get<int>(), node.at("dW").get<double>(),
                                 node.at("p").get<double>()});
        const int parent = static_cast<int>(pre[k].size()) - 1;
        for (const auto& mark : node.at("marks"))
          post[k].push_back(
              PostNode{parent, mark.at("mark").get<std::string>(), mark.at("q").get<double>()});
      }
    }
    return FiltrationTree(n, dt, std::move(pre), std::move(post));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

Json obstacle_to_json(const LadlagProcess& obstacle) {
  Json stages = Json::array();
  for (std::size_t k = 0; k < obstacle.value.size(); ++k)
    stages.push_back(
        {{"left", array_to_json(obstacle.left[k])}, {"value", array_to_json(obstacle.value[k])}});
  return Json{{"stages", stages}};
}

LadlagProcess obstacle_from_json(const Json& j, const FiltrationTree& tree) {
  try {
    const auto& stages = j.at("stages");
    if (static_cast<int>(stages.size()) != tree.n_stages() + 1)
      throw Error(ErrorCode::ParseError, "obstacle must list every stage including stage 0");
    LadlagProcess out = LadlagProcess::zeros(tree);
    for (int k = 0; k <= tree.n_stages(); ++k) {
      out.left[k] = array_from_json(stages[k].at("left"), tree.n_atoms(k), "obstacle left");
      out.value[k] = array_from_json(stages[k].at("value"), tree.n_atoms(k), "obstacle value");
    }
    out.left[0] = out.value[0];  // stage 0 carries a single instant
    return out;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

Json model_to_json(const FiltrationTree& tree, const std::optional<LadlagProcess>& obstacle) {
  Json j = tree_to_json(tree);
  if (obstacle) j["obstacle"] = obstacle_to_json(*obstacle);
  return j;
}

Driver driver_from_json(const Json& j) {
  try {
    std::map<std::string, double> params;
    if (j.contains("params"))
      for (const auto& [key, value] : j.at("params").items()) params[key] = value.get<double>();
    return make_driver(j.at("name").get<std::string>(), params);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

Json driver_to_json(const Driver& driver) {
  Json params = Json::object();
  for (const auto& [key, value] : driver.params) params[key] = value;
  return Json{{"name", driver.name}, {"params", params}};
}

Model load_model(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed model JSON: ") + e.what());
  }
  FiltrationTree tree = tree_from_json(j);
  std::optional<LadlagProcess> obstacle;
  if (j.contains("obstacle")) obstacle = obstacle_from_json(j.at("obstacle"), tree);
  std::optional<Driver> driver;
  if (j.contains("driver")) driver = driver_from_json(j.at("driver"));
  return Model{std::move(tree), std::move(obstacle), std::move(driver)};
}

Json stopping_time_to_json(const ExtendedStoppingTime& tau) {
  Json stages = Json::array();
  for (const auto& layer : tau.decision) {
    Json row = Json::array();
    for (StopDecision d : layer) row.push_back(decision_name(d));
    stages.push_back(row);
  }
  return Json{{"from_stage", tau.from_stage}, {"decisions", stages}};
}

ExtendedStoppingTime stopping_time_from_json(const Json& j, const FiltrationTree& tree) {
  try {
    ExtendedStoppingTime tau;
    tau.from_stage = j.at("from_stage").get<int>();
    const auto& stages = j.at("decisions");
    if (static_cast<int>(stages.size()) != tree.n_stages() + 1)
      throw Error(ErrorCode::ParseError, "decision list must cover every stage");
    tau.decision.resize(stages.size());
    for (int k = 0; k <= tree.n_stages(); ++k) {
      if (static_cast<int>(stages[k].size()) != tree.n_atoms(k))
        throw Error(ErrorCode::ParseError, "decision row does not match atom count");
      for (const auto& entry : stages[k])
        tau.decision[k].push_back(decision_from_name(entry.get<std::string>()));
    }
    return tau;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

void write_solution_csv(std::ostream& os, const FiltrationTree& tree, const RbsdeSolution& sol) {
  os << "stage,instant,atom,Y,pYplus,dA,dB,pi,dMW,dMeta,obstacle_left,obstacle_value\n";
  const int n = tree.n_stages();
  for (int k = sol.from_stage; k <= n; ++k) {
    if (k > sol.from_stage) {
      for (int i = 0; i < tree.n_atoms(k); ++i) {
        os << k << ",left," << i << "," << fmt(sol.y.left[k][i]) << ",,"
           << fmt(sol.da[k][i]) << ",,," << fmt(sol.dmw[k][i]) << ",,"
           << fmt(sol.obstacle.left[k][i]) << ",\n";
      }
    }
    for (int i = 0; i < tree.n_atoms(k); ++i) {
      os << k << ",value," << i << "," << fmt(sol.y.value[k][i]) << ","
         << fmt(sol.p_y_plus[k][i]) << ",," << fmt(sol.db[k][i]) << ",,,,,"
         << fmt(sol.obstacle.value[k][i]) << "\n";
    }
    if (k < n) {
      for (int a = 0; a < tree.n_post(k); ++a) {
        os << k << ",plus," << a << "," << fmt(sol.y_plus.value[k][a]) << ",,,,"
           << fmt(sol.pi.value[k][a]) << ",," << fmt(sol.dmeta.value[k][a]) << ",,\n";
      }
    }
  }
}

Json solution_summary(const FiltrationTree& tree, const RbsdeSolution& sol) {
  Json j;
  j["stages"] = tree.n_stages();
  j["dt"] = tree.dt();
  j["side"] = sol.side == BarrierSide::Lower ? "lower" : "upper";
  j["from_stage"] = sol.from_stage;
  j["Y0"] = sol.y.value[0][0];
  double total_da = 0.0, total_db = 0.0;
  for (int k = 0; k <= tree.n_stages(); ++k) {
    total_da += sol.da[k].sum();
    total_db += sol.db[k].sum();
  }
  j["total_dA"] = total_da;
  j["total_dB"] = total_db;
  return j;
}

Json skorokhod_report_to_json(const SkorokhodReport& report) {
  Json violations = Json::array();
  for (const auto& v : report.violations)
    violations.push_back({{"node", v.node}, {"rule", v.rule}, {"magnitude", v.magnitude}});
  return Json{{"violations", violations},
              {"max_identity_residual", report.max_identity_residual},
              {"ok", report.empty()}};
}

Json validation_report_to_json(const ValidationReport& report) {
  Json violations = Json::array();
  for (const auto& v : report.violations)
    violations.push_back({{"node", v.node}, {"rule", v.rule}, {"magnitude", v.magnitude}});
  return Json{{"violations", violations}, {"ok", report.empty()}};
}

Json diagnostics_to_json(int S, const StoppingDiagnostics& diag) {
  Json j;
  j["S"] = S;
  j["tau"] = stopping_time_to_json(diag.tau);
  j["value_per_atom"] = array_to_json(diag.attained);
  j["gap_per_atom"] = array_to_json(diag.gap);
  j["criterion"] = {{"a", diag.crit_a}, {"b", diag.crit_b}, {"c", diag.crit_c}};
  return j;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::BadArgument, "cannot open " + tmp + " for writing");
    os << content;
    if (!os.good()) throw Error(ErrorCode::BadArgument, "write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::BadArgument, "cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace presto
