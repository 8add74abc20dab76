#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "matchwire/deferred_acceptance.hpp"
#include "matchwire/error.hpp"
#include "matchwire/externality.hpp"
#include "matchwire/harness.hpp"
#include "matchwire/profile.hpp"
#include "matchwire/scenario_cr.hpp"
#include "matchwire/scenario_d2d.hpp"
#include "matchwire/scenario_hetnet.hpp"
#include "matchwire/stability.hpp"

namespace py = pybind11;
using namespace matchwire;

namespace {

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

Pairs to_pairs(const Matching& m) {
  Pairs out;
  for (const auto& [u, r] : m.pairs()) out.emplace_back(u.index, r.index);
  return out;
}

Matching from_pairs(std::size_t nu, std::size_t nr, const Pairs& pairs) {
  Matching m(nu, nr);
  for (const auto& [u, r] : pairs) m.add(UserId{u}, ResourceId{r});
  return m;
}

ValidatedProfile make_profile(const std::vector<std::vector<std::size_t>>& user_prefs,
                              const std::vector<std::vector<std::size_t>>& resource_prefs,
                              std::optional<std::vector<int>> user_quota, std::optional<std::vector<int>> resource_quota) {
  auto p = PreferenceProfile::empty(user_prefs.size(), resource_prefs.size());
  for (std::size_t u = 0; u < user_prefs.size(); ++u) {
    for (auto r : user_prefs[u]) p.user_prefs[u].push_back(ResourceId{r});
  }
  for (std::size_t r = 0; r < resource_prefs.size(); ++r) {
    for (auto u : resource_prefs[r]) p.resource_prefs[r].push_back(UserId{u});
  }
  if (user_quota) p.user_quota = *user_quota;
  if (resource_quota) p.resource_quota = *resource_quota;
  return validate_profile(std::move(p));
}

Proposer parse_proposer(const std::string& side) {
  if (side == "users") return Proposer::Users;
  if (side == "resources") return Proposer::Resources;
  throw MatchError(ErrorCode::InvalidArgument, "proposer must be 'users' or 'resources'");
}

py::dict da_dict(const DaResult& r) {
  py::dict d;
  d["pairs"] = to_pairs(r.matching);
  d["proposals"] = r.proposals;
  d["rounds"] = r.rounds;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-sided matching core and wireless allocation scenarios";

  static py::exception<MatchError> match_error(m, "MatchError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const MatchError& e) {
      // Raise an instance carrying the error code as `.code`.
      py::object err = py::reinterpret_borrow<py::object>(match_error)(e.what());
      err.attr("code") = py::str(std::string(to_string(e.code())));
      PyErr_SetObject(match_error.ptr(), err.ptr());
    }
  });

  py::class_<ValidatedProfile>(m, "Profile")
      .def(py::init(&make_profile), py::arg("user_prefs"), py::arg("resource_prefs"),
           py::arg("user_quota") = py::none(), py::arg("resource_quota") = py::none())
      .def_property_readonly("n_users", &ValidatedProfile::n_users)
      .def_property_readonly("n_resources", &ValidatedProfile::n_resources)
      .def_property_readonly("acceptable_pairs", &ValidatedProfile::acceptable_pairs)
      .def("user_prefs",
           [](const ValidatedProfile& p, std::size_t u) {
             std::vector<std::size_t> out;
             for (auto r : p.user_prefs(UserId{u})) out.push_back(r.index);
             return out;
           })
      .def("resource_prefs",
           [](const ValidatedProfile& p, std::size_t r) {
             std::vector<std::size_t> out;
             for (auto u : p.resource_prefs(ResourceId{r})) out.push_back(u.index);
             return out;
           })
      .def("__eq__", [](const ValidatedProfile& a, const ValidatedProfile& b) { return a == b; });

  m.def(
      "deferred_acceptance",
      [](const ValidatedProfile& p, const std::string& proposer) {
        return da_dict(run_deferred_acceptance(p, parse_proposer(proposer)));
      },
      py::arg("profile"), py::arg("proposer") = "users");

  m.def(
      "blocking_pairs",
      [](const ValidatedProfile& p, const Pairs& pairs) {
        Pairs out;
        for (const auto& b : find_blocking_pairs(from_pairs(p.n_users(), p.n_resources(), pairs), p)) {
          out.emplace_back(b.user.index, b.resource.index);
        }
        return out;
      },
      py::arg("profile"), py::arg("pairs"));

  m.def(
      "stable_matchings",
      [](const ValidatedProfile& p, std::size_t cap) {
        std::vector<Pairs> out;
        for (const auto& s : enumerate_stable_matchings(p, cap)) out.push_back(to_pairs(s));
        return out;
      },
      py::arg("profile"), py::arg("max_per_side") = kDefaultEnumerationCap);

  m.def(
      "iterative_da",
      [](std::size_t nu, std::size_t nr, py::function user_utility, py::function resource_utility,
         std::optional<std::vector<int>> user_quota, std::optional<std::vector<int>> resource_quota,
         std::size_t max_iterations) {
        auto quotas = Quotas::uniform(nu, nr);
        if (user_quota) quotas.user = *user_quota;
        if (resource_quota) quotas.resource = *resource_quota;
        FunctionContext ctx(
            nu, nr,
            [&](UserId u, ResourceId r, const Matching& mm) {
              return user_utility(u.index, r.index, to_pairs(mm)).cast<double>();
            },
            [&](ResourceId r, UserId u, const Matching& mm) {
              return resource_utility(r.index, u.index, to_pairs(mm)).cast<double>();
            });
        const auto res = iterative_da(ctx, quotas, max_iterations);
        py::dict d;
        d["pairs"] = to_pairs(res.matching);
        d["termination"] = to_string(res.trace.termination);
        d["iterations"] = res.trace.iterations();
        d["trace_csv"] = trace_to_csv(res.trace);
        return d;
      },
      py::arg("n_users"), py::arg("n_resources"), py::arg("user_utility"), py::arg("resource_utility"),
      py::arg("user_quota") = py::none(), py::arg("resource_quota") = py::none(), py::arg("max_iterations") = 50);

  m.def("run_experiment_json", [](const std::string& config) {
    const auto cfg = harness::parse_config(nlohmann::json::parse(config));
    return harness::to_json(harness::run_experiment(cfg));
  });
  m.def("experiment_csv", [](const std::string& config) {
    const auto cfg = harness::parse_config(nlohmann::json::parse(config));
    return harness::to_csv(harness::run_experiment(cfg));
  });

  m.def(
      "cr_allocate",
      [](const std::string& method, std::uint64_t seed, std::size_t n_su, std::size_t n_pu, double prior_active) {
        cr::CrGeneratorConfig cfg;
        cfg.n_su = n_su;
        cfg.n_pu = n_pu;
        cfg.prior_active = prior_active;
        const auto in = cr::generate_instance(cfg, seed);
        const auto kind = method == "ModifiedDA"    ? cr::CrMethod::ModifiedDA
                          : method == "ClassicalDA" ? cr::CrMethod::ClassicalDA
                          : method == "Random"
                              ? cr::CrMethod::Random
                              : throw MatchError(ErrorCode::InvalidArgument, "unknown cr method '" + method + "'");
        const auto r = cr::cr_allocate(in, kind, seed);
        py::dict d;
        d["pairs"] = to_pairs(r.matching);
        d["sum_rate"] = r.sum_rate;
        d["proposals"] = r.proposals;
        d["blocking_pairs"] = r.blocking_pairs;
        return d;
      },
      py::arg("method"), py::arg("seed"), py::arg("n_su") = 4, py::arg("n_pu") = 4, py::arg("prior_active") = 0.5);

  m.def(
      "hetnet_associate",
      [](const std::string& method, std::uint64_t seed, std::size_t n_users, double tradeoff_weight) {
        hetnet::HetNetGeneratorConfig cfg;
        cfg.n_users = n_users;
        cfg.tradeoff_weight = tradeoff_weight;
        const auto in = hetnet::generate_instance(cfg, seed);
        if (method != "MatchingWithTransfers" && method != "BestNeighbor") {
          throw MatchError(ErrorCode::InvalidArgument, "unknown hetnet method '" + method + "'");
        }
        const auto r = hetnet::hetnet_associate(in, method == "BestNeighbor" ? hetnet::HetNetMethod::BestNeighbor
                                                                              : hetnet::HetNetMethod::MatchingWithTransfers);
        py::dict d;
        d["pairs"] = to_pairs(r.matching);
        d["avg_user_utility"] = r.avg_user_utility;
        d["iterations"] = r.iterations();
        d["transfers"] = r.transfers.size();
        d["exchange_stable"] = exchange_stability_check(r.matching, *hetnet::hetnet_context(in), hetnet::quotas_of(in));
        return d;
      },
      py::arg("method"), py::arg("seed"), py::arg("n_users") = 50, py::arg("tradeoff_weight") = 0.5);

  m.def(
      "d2d_cheat",
      [](std::uint64_t seed, std::size_t n_cu, std::size_t n_du, const std::string& mode) {
        d2d::D2dGeneratorConfig cfg;
        cfg.n_cu = n_cu;
        cfg.n_du = n_du;
        if (mode != "Payment" && mode != "Interference") {
          throw MatchError(ErrorCode::InvalidArgument, "cu mode must be Payment or Interference");
        }
        const auto cu_mode = mode == "Payment" ? d2d::CuMode::Payment : d2d::CuMode::Interference;
        const auto rep = d2d::d2d_cheat(d2d::generate_instance(cfg, seed), cu_mode);
        auto ids = [](const std::vector<UserId>& v) {
          std::vector<std::size_t> out;
          for (auto u : v) out.push_back(u.index);
          return out;
        };
        py::dict d;
        d["truthful_pairs"] = to_pairs(rep.truthful_matching);
        d["cheated_pairs"] = to_pairs(rep.cheated_matching);
        d["cabal"] = ids(rep.cabal);
        d["accomplices"] = ids(rep.accomplices);
        d["truthful_du_utility"] = rep.truthful_du_utility;
        d["cheated_du_utility"] = rep.cheated_du_utility;
        d["truthful_system_utility"] = rep.truthful_system_utility;
        d["cheated_system_utility"] = rep.cheated_system_utility;
        d["true_blocking_pairs"] = rep.true_blocking_pairs.size();
        return d;
      },
      py::arg("seed"), py::arg("n_cu") = 5, py::arg("n_du") = 5, py::arg("mode") = "Payment");
}
