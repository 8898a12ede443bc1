// mockdissect: command-line front end for the series, cusp and certification routines.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "mockdissect/certify.hpp"

using namespace mockdissect;

namespace {

GroupSpec parse_group(const std::string& s) {
  auto p = s.find(',');
  if (p == std::string::npos) throw ParseError("group must be N,M", 0);
  return {std::stol(s.substr(0, p)), std::stol(s.substr(p + 1))};
}

template <class R>
void print_series(const QSeries<R>& s) {
  std::cout << serialize(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact q-series for the M2-rank, cusp data, and valence-formula certification"};
  app.require_subcommand(1);

  long a = 1, c = 7, k = 0, prec = 50, n = 10, N = 196, M = 28, d = 0, prec_cap = 4000;
  int r = 1;
  unsigned workers = 1;
  std::string route = "eulerian", identity = std::string(MOCKDISSECT_DATA_DIR) + "/c7.json", group = "196,28",
              cusp, g1, out;
  bool json = false, tsv = false, check = false;

  auto* r2 = app.add_subcommand("r2", "R2(zeta_c^a; q) below q^prec");
  r2->add_option("--a", a)->required();
  r2->add_option("--c", c)->required();
  r2->add_option("--prec", prec);
  r2->add_option("--route", route)->check(CLI::IsMember({"eulerian", "lambert", "appell", "enumeration"}));

  auto* s = app.add_subcommand("s", "S(k,c;tau) below q^prec");
  s->add_option("--k", k)->required();
  s->add_option("--c", c)->required();
  s->add_option("--prec", prec);
  s->add_option("--route", route)->check(CLI::IsMember({"sum", "mu"}));

  auto* bf = app.add_subcommand("bruteforce", "M2-rank counts of partitions of n without repeated odd parts (TSV)");
  bf->add_option("--n", n)->required();
  auto* bf_c = bf->add_option("--c", c);
  auto* bf_a = bf->add_option("--a", a)->needs(bf_c);

  auto* cu = app.add_subcommand("cusps", "cusp representatives and widths of Gamma0(N) ∩ Gamma1(M)");
  cu->add_option("--gamma0", N)->required();
  cu->add_option("--gamma1", M)->required();
  cu->add_flag("--json", json);
  cu->add_flag("--tsv", tsv);

  auto* ord = app.add_subcommand("orders", "per-cusp order bounds of LHS - RHS for an identity (TSV)");
  ord->add_option("--identity", identity);
  ord->add_option("--group", group);
  ord->add_option("--cusp", cusp);

  auto* rd = app.add_subcommand("rankdiff", "rank differences R2_{r,0,7}(d; q) from an identity");
  rd->add_option("--identity", identity);
  rd->add_option("--r", r)->check(CLI::Range(1, 3));
  rd->add_option("--d", d)->check(CLI::Range(0, 6));
  rd->add_option("--prec", prec);
  rd->add_flag("--check", check, "compare all 21 series with the Eulerian and enumeration oracles");
  rd->add_option("--workers", workers);

  auto* ds = app.add_subcommand("dissect", "R2_d(q) assembled from an identity");
  ds->add_option("--identity", identity);
  ds->add_option("--d", d)->required();
  ds->add_option("--prec", prec);

  auto* ce = app.add_subcommand("certify", "valence-formula certificate; exit 0 PASS, 2 FAIL, 1 error");
  ce->add_option("--identity", identity);
  ce->add_option("--group", group);
  ce->add_option("--g1", g1, "<residue>:<index>, or 'best' to search all J terms");
  ce->add_option("--prec-cap", prec_cap);
  ce->add_option("--workers", workers);
  ce->add_option("--out", out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*r2) {
      if (route == "eulerian") print_series(r2_eulerian(a, c, prec));
      else if (route == "lambert") print_series(r2_lambert(a, c, prec));
      else if (route == "enumeration") print_series(r2_series_bruteforce(a, static_cast<int>(c), prec));
      else
        print_series(qs_scale(appell_A2_special(a, c, prec) * podp_generating_function(prec),
                              CycNum::zeta_pow(static_cast<int>(c), -a) - CycNum::one(static_cast<int>(c))));
    } else if (*s) {
      if (route == "mu") print_series(mu_special_s(k, c, Rational(prec)));
      else print_series(s_series(k, c, Rational(prec)));
    } else if (*bf) {
      if (bf_c->count() == 0) {
        std::cout << "rank\tcount\n";
        for (const auto& [m, cnt] : rank_counts(static_cast<int>(n))) std::cout << m << '\t' << cnt.get_str() << '\n';
      } else {
        std::cout << "residue\tcount\n";
        for (long j = 0; j < c; ++j) std::cout << j << '\t' << n2_mod(j, c, static_cast<int>(n)).get_str() << '\n';
        if (bf_a->count() > 0) {
          auto x = r2_series_bruteforce(a, static_cast<int>(c), n + 1);
          std::cout << "# coefficient of q^" << n << " in R2(zeta_" << c << "^" << a << "; q): " << x.coeff_at(Rational(n))
                    << '\n';
        }
      }
    } else if (*cu) {
      GroupSpec G{N, M};
      auto cs = cusp_set(G);
      if (json) {
        nlohmann::ordered_json j;
        j["cusps"] = nlohmann::ordered_json::array();
        for (const auto& [cp, w] : cs) j["cusps"].push_back({{"num", cp.num}, {"den", cp.den}, {"width", w}});
        j["index"] = group_index(G);
        std::cout << j.dump(2) << '\n';
      } else {
        std::cout << "cusp\twidth\n";
        for (const auto& [cp, w] : cs) std::cout << cp.to_string() << '\t' << w << '\n';
      }
    } else if (*ord) {
      Identity id = load_identity(identity);
      GroupSpec G = parse_group(group);
      std::cout << "cusp\twidth\tbound\texact\n";
      for (const auto& [cp, w] : cusp_set(G)) {
        if (!cusp.empty() && !cusp_equiv(cp, Cusp::parse(cusp), G)) continue;
        OrderBound b = ord_bound_difference(id, cp);
        std::cout << cp.to_string() << '\t' << w << '\t' << b.value << '\t' << (b.exact ? "yes" : "no") << '\n';
      }
    } else if (*rd) {
      Identity id = load_identity(identity);
      if (check) {
        auto reps = check_rank_differences(id, {1, 2, 3}, {0, 1, 2, 3, 4, 5, 6}, prec, kDefaultEnumerationCap, workers);
        bool ok = true;
        std::cout << "r\td\tintegral\teulerian_through\tenumerated_through\tfirst_disagreement\n";
        for (const auto& x : reps) {
          ok = ok && x.ok();
          std::cout << x.r << '\t' << x.d << '\t' << (x.integral ? "yes" : "no") << '\t' << x.checked_through << '\t'
                    << x.enumerated_through << '\t'
                    << (x.first_disagreement ? std::to_string(*x.first_disagreement) : "-") << '\n';
        }
        return ok ? 0 : 2;
      }
      auto series = rank_diff_from_identity(id, r, d, Rational(prec), workers).compacted();
      std::cout << "n\tcoefficient\n";
      for (long e = 0; e < prec; ++e) std::cout << e << '\t' << series.coeff_at(Rational(e)) << '\n';
    } else if (*ds) {
      Identity id = load_identity(identity);
      print_series(assemble_residue(id, d, Rational(prec)).compacted());
    } else if (*ce) {
      Identity id = load_identity(identity);
      GroupSpec G = parse_group(group);
      TermRef ref = default_g1(id);
      if (g1 == "best") {
        auto ranked = search_g1(id, G, workers);
        std::cerr << "g1 search over " << ranked.size() << " terms:\n";
        for (const auto& [t, B] : ranked) std::cerr << "  " << t.to_string() << "\tB=" << B << '\n';
        ref = ranked.front().first;
      } else if (!g1.empty()) {
        ref = TermRef::parse(g1);
      }
      Certificate cert = valence_certificate(id, G, ref, prec_cap, workers);
      std::string text = certificate_json(cert).dump(2) + "\n";
      if (out.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(out);
        f << text;
        if (!f) throw Error("cannot write " + out);
      }
      std::cerr << (cert.pass ? "PASS" : "FAIL") << " B=" << cert.total_noninf << " K=" << cert.required_order
                << " verified_through=" << cert.verified_through << '\n';
      return cert.pass ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
