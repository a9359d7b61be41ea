#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "usdkit/distill.hpp"
#include "usdkit/error.hpp"
#include "usdkit/families.hpp"
#include "usdkit/json_io.hpp"
#include "usdkit/numkernel.hpp"
#include "usdkit/simulate.hpp"
#include "usdkit/tolerances.hpp"
#include "usdkit/usd.hpp"

namespace {

using usdkit::ComplexMatrix;
using usdkit::Error;
using usdkit::ErrorCode;
using usdkit::LossyOperator;
using usdkit::StateSet;
using Json = usdkit::io::Json;

constexpr double kPi = 3.14159265358979323846;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
      return 2;
    case ErrorCode::Singular:
    case ErrorCode::NonInvertible:
    case ErrorCode::LinearlyDependent:
    case ErrorCode::NotPassive:
    case ErrorCode::NegativeEigenvalue:
    case ErrorCode::NoConvergence:
      return 4;
    default:
      return 3;  // dimension / precondition violations
  }
}

struct Options {
  std::string output = "json";
  double ortho_tol = usdkit::tol::orthogonality;
};

Json tolerances_section(double ortho_tol) {
  Json t;
  t["orthogonality"] = ortho_tol;
  t["svd_reconstruction"] = usdkit::tol::svd_reconstruction;
  t["singularity_rel"] = usdkit::tol::singularity_rel;
  t["degeneracy_rel"] = usdkit::tol::degeneracy_rel;
  t["passivity_slack"] = usdkit::tol::passivity_slack;
  t["hermiticity"] = usdkit::tol::hermiticity;
  return t;
}

Json vector_to_json(const usdkit::Vector& v) {
  Json out = Json::array();
  for (const auto& z : v) out.push_back(Json::array({z.real(), z.imag()}));
  return out;
}

std::string format_scalar(const Json& j) {
  if (j.is_number_float()) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", j.get<double>());
    return buf;
  }
  return j.dump();
}

std::string single_line(const Json& j) {
  if (!j.is_array()) return format_scalar(j);
  std::string out = "[";
  for (size_t i = 0; i < j.size(); ++i) {
    if (i) out += ", ";
    out += single_line(j[i]);
  }
  return out + "]";
}

void print_table(const Json& j, std::ostream& os, int depth = 0) {
  const std::string pad(static_cast<size_t>(depth) * 2, ' ');
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      os << pad << key << ":\n";
      print_table(value, os, depth + 1);
    } else if (value.is_array()) {
      bool nested = false;
      for (const auto& el : value) {
        if (el.is_structured()) {
          nested = true;
          break;
        }
      }
      if (!nested) {
        os << pad << key << ": ";
        for (size_t i = 0; i < value.size(); ++i) {
          os << (i ? ", " : "") << format_scalar(value[i]);
        }
        os << "\n";
      } else {
        os << pad << key << ":\n";
        for (const auto& el : value) {
          if (el.is_object()) {
            print_table(el, os, depth + 1);
          } else {
            os << pad << "  " << single_line(el) << "\n";
          }
        }
      }
    } else {
      os << pad << key << ": " << format_scalar(value) << "\n";
    }
  }
}

void emit(const Json& report, const Options& opt) {
  if (opt.output == "table") {
    print_table(report, std::cout);
  } else {
    std::cout << usdkit::io::dump(report);
  }
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t comma = text.find(',', pos);
    const std::string token =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      usdkit::fail(ErrorCode::ParseError, std::string("bad number in ") + what + ": " + token);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("USDKIT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      usdkit::fail(ErrorCode::ParseError, "USDKIT_SEED is not an integer");
    }
  }
  return 0;
}

// --- commands -------------------------------------------------------------

Json cmd_analyze(const std::string& path, const Options& opt) {
  LossyOperator k(usdkit::io::read_matrix_file(path));
  const usdkit::AnalysisReport a = usdkit::analyze(k);
  Json r;
  r["command"] = "analyze";
  r["dim"] = k.dim();
  r["singular_values"] = a.singular_values;
  r["spectral_norm"] = a.spectral_norm;
  r["passive"] = a.passive;
  r["discriminating"] = a.discriminating;
  r["best_angle_rad"] = a.best_angle_rad;
  r["best_angle_deg"] = a.best_angle_rad * 180.0 / kPi;
  if (a.condition_product) {
    r["condition_product"] = *a.condition_product;
    r["angle_lower_bound"] = *a.angle_lower_bound;
    r["angle_upper_bound"] = *a.angle_upper_bound;
  }
  r["tolerances"] = tolerances_section(opt.ortho_tol);
  return r;
}

Json cmd_optimal_pair(const std::string& path, const Options& opt) {
  LossyOperator k(usdkit::io::read_matrix_file(path));
  const usdkit::OptimalPair p = usdkit::optimal_pair(k);
  Json r;
  r["command"] = "optimal-pair";
  r["g_plus"] = vector_to_json(p.g_plus);
  r["g_minus"] = vector_to_json(p.g_minus);
  r["out_plus"] = vector_to_json(p.out_plus);
  r["out_minus"] = vector_to_json(p.out_minus);
  r["angle_rad"] = p.angle_rad;
  r["angle_deg"] = p.angle_rad * 180.0 / kPi;
  r["cos_angle"] = std::cos(p.angle_rad);
  r["detection_probability"] = p.detection_probability;
  r["degenerate_optimum"] = p.degenerate_optimum;
  r["tolerances"] = tolerances_section(opt.ortho_tol);
  return r;
}

Json cmd_discriminate(const std::string& path, const std::string& weights_csv,
                      const std::string& unitary_path, const Options& opt) {
  StateSet states = usdkit::io::read_state_set_file(path);
  std::optional<std::vector<double>> weights;
  if (!weights_csv.empty()) weights = parse_double_list(weights_csv, "--weights");
  std::optional<ComplexMatrix> u_out;
  if (!unitary_path.empty()) u_out = usdkit::io::read_matrix_file(unitary_path);

  LossyOperator k = usdkit::synthesize_discriminator(states, weights, u_out);
  Json r;
  r["command"] = "discriminate";
  r["matrix"] = usdkit::io::matrix_to_json(k.matrix());
  r["singular_values"] = k.svd().singular_values;
  r["spectral_norm"] = k.s_max();
  r["passive"] = k.passive();
  // Realized Lambda_ii: K maps state i onto this weight times an output
  // basis column, whatever the input normalization.
  std::vector<double> effective;
  for (int i = 0; i < states.count(); ++i) {
    effective.push_back(usdkit::norm(k.matrix() * states.state(i)));
  }
  r["effective_weights"] = effective;
  r["output_gram_offdiag_max"] =
      usdkit::normalized_offdiag_max(usdkit::gram(k.matrix() * states.states()));
  r["tolerances"] = tolerances_section(opt.ortho_tol);
  return r;
}

Json cmd_distill(const std::string& path, const Options& opt) {
  usdkit::BipartiteState state = usdkit::io::read_bipartite_file(path);
  const usdkit::SchmidtData sd = usdkit::schmidt(state);
  const usdkit::DistillationPlan plan = usdkit::plan_distillation(state);
  const usdkit::SchmidtData out_sd = usdkit::schmidt(plan.output_state);

  Json r;
  r["command"] = "distill";
  r["schmidt_coefficients"] = sd.coefficients_lambda;
  r["schmidt_rank"] = sd.rank;
  r["success_probability"] = plan.success_probability;
  r["filter"] = usdkit::io::matrix_to_json(plan.filter.matrix());
  r["output_state"] = usdkit::io::matrix_to_json(plan.output_state.coefficients());
  r["output_norm"] = plan.output_state.norm();
  const double spread = out_sd.coefficients_lambda.front() - out_sd.coefficients_lambda.back();
  r["output_schmidt_spread"] =
      out_sd.coefficients_lambda.front() > 0.0 ? spread / out_sd.coefficients_lambda.front() : 0.0;
  r["tolerances"] = tolerances_section(opt.ortho_tol);
  return r;
}

Json cmd_family(const std::string& path, const std::string& states_path,
                const std::string& phases_csv, const std::string& unitary_path,
                const Options& opt) {
  LossyOperator k(usdkit::io::read_matrix_file(path));
  Json r;
  r["command"] = "family";

  if (!phases_csv.empty()) {
    if (states_path.empty()) {
      usdkit::fail(ErrorCode::ParseError, "--phases requires --states");
    }
    StateSet states = usdkit::io::read_state_set_file(states_path);
    const std::vector<double> phases = parse_double_list(phases_csv, "--phases");
    StateSet transformed = usdkit::apply_phase_family(k, states, phases, opt.ortho_tol);
    r["mode"] = "phase";
    r["phases"] = phases;
    r["states"] = usdkit::io::state_set_to_json(transformed);
    r["output_gram_offdiag_max"] =
        usdkit::normalized_offdiag_max(usdkit::gram(k.matrix() * transformed.states()));
  } else if (!unitary_path.empty()) {
    ComplexMatrix u0 = usdkit::io::read_matrix_file(unitary_path);
    usdkit::DistillationFamily fam = usdkit::distillation_family(k, u0);
    r["mode"] = "distillation";
    r["states"] = usdkit::io::state_set_to_json(fam.states);
    r["input_gram"] = usdkit::io::matrix_to_json(fam.input_gram);
    r["canonical_gram"] = usdkit::io::matrix_to_json(fam.canonical_gram);
    r["max_output_deviation"] = usdkit::max_abs_diff(k.matrix() * fam.states.states(), u0);
  } else {
    const usdkit::DegeneracyStructure d = usdkit::degeneracy_structure(k);
    r["mode"] = "degeneracy";
    r["singular_values"] = k.svd().singular_values;
    Json groups = Json::array();
    for (const auto& g : d.groups) groups.push_back(g);
    r["groups"] = std::move(groups);
    r["tolerance_used"] = d.tolerance_used;
  }
  r["tolerances"] = tolerances_section(opt.ortho_tol);
  return r;
}

Json cmd_inconclusive(const std::string& path, const std::string& rho_path, const Options& opt) {
  LossyOperator k(usdkit::io::read_matrix_file(path));
  ComplexMatrix rho = rho_path.empty()
                          ? (1.0 / k.dim()) * ComplexMatrix::identity(k.dim())
                          : usdkit::io::read_matrix_file(rho_path);
  const usdkit::InconclusiveAnalysis a = usdkit::inconclusive_analysis(k, rho);
  Json r;
  r["command"] = "inconclusive";
  r["m_question"] = usdkit::io::matrix_to_json(a.m_question);
  r["e_question"] = usdkit::io::matrix_to_json(a.e_question);
  r["rho_question"] = usdkit::io::matrix_to_json(a.rho_question);
  r["rank"] = a.rank;
  r["inconclusive_trace"] = a.inconclusive_trace;
  r["tolerances"] = tolerances_section(opt.ortho_tol);
  return r;
}

Json counts_to_json(const usdkit::ShotResult& res) {
  Json counts;
  for (const auto& [label, value] : res.counts) counts[label] = value;
  return counts;
}

Json cmd_simulate(const std::string& matrix_path, const std::string& states_path,
                  const std::string& distill_path, std::uint64_t shots, std::uint64_t seed,
                  const Options& opt) {
  Json r;
  r["command"] = "simulate";
  r["shots"] = shots;
  r["seed"] = seed;

  if (!distill_path.empty()) {
    usdkit::BipartiteState state = usdkit::io::read_bipartite_file(distill_path);
    const usdkit::DistillationPlan plan = usdkit::plan_distillation(state);
    const usdkit::ShotResult res = usdkit::measure_distillation(plan, shots, seed);
    r["mode"] = "distillation";
    r["analytic_success_probability"] = plan.success_probability;
    r["counts"] = counts_to_json(res);
    if (shots > 0) {
      r["success_frequency"] =
          static_cast<double>(res.count_of("success")) / static_cast<double>(shots);
    }
    r["tolerances"] = tolerances_section(opt.ortho_tol);
    return r;
  }

  if (matrix_path.empty() || states_path.empty()) {
    usdkit::fail(ErrorCode::ParseError, "simulate needs a matrix and --states (or --distill)");
  }
  LossyOperator k(usdkit::io::read_matrix_file(matrix_path));
  StateSet states = usdkit::io::read_state_set_file(states_path);
  const std::vector<usdkit::ShotResult> results =
      usdkit::measure_usd(k, states, shots, seed, opt.ortho_tol);

  r["mode"] = "usd";
  Json per_state = Json::array();
  for (size_t i = 0; i < results.size(); ++i) {
    Json entry;
    entry["state"] = i;
    entry["counts"] = counts_to_json(results[i]);
    if (shots > 0) {
      const std::uint64_t inconclusive = results[i].count_of("inconclusive");
      entry["conclusive_frequency"] =
          static_cast<double>(shots - inconclusive) / static_cast<double>(shots);
    }
    per_state.push_back(std::move(entry));
  }
  r["results"] = std::move(per_state);
  r["tolerances"] = tolerances_section(opt.ortho_tol);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"usdkit - singular value analysis of lossy evolution operators:\n"
               "unambiguous state discrimination and entanglement distillation"};
  app.require_subcommand(1);

  Options opt;
  app.add_option("--output", opt.output, "Report format: json or table")
      ->check(CLI::IsMember({"json", "table"}));
  app.add_option("--tol", opt.ortho_tol, "Orthogonality tolerance for discrimination checks");

  std::string matrix_path, states_path, rho_path, unitary_path, distill_path;
  std::string phases_csv, weights_csv;
  std::uint64_t shots = 100000;
  std::optional<std::uint64_t> seed_flag;

  auto* analyze = app.add_subcommand("analyze", "Discrimination summary of an operator");
  analyze->add_option("matrix", matrix_path, "Matrix JSON file")->required();

  auto* pair = app.add_subcommand("optimal-pair", "Extremal two-state input pair");
  pair->add_option("matrix", matrix_path, "Matrix JSON file")->required();

  auto* discriminate =
      app.add_subcommand("discriminate", "Synthesize a discriminator for a state set");
  discriminate->add_option("states", states_path, "State set JSON file")->required();
  discriminate->add_option("--weights", weights_csv, "Comma-separated posterior weights");
  discriminate->add_option("--unitary", unitary_path, "Output basis (matrix JSON)");

  auto* distill = app.add_subcommand("distill", "Distillation plan for a bipartite state");
  distill->add_option("coefficients", distill_path, "Coefficient matrix JSON file")->required();

  auto* family = app.add_subcommand(
      "family", "State families a fixed operator discriminates (or its degeneracies)");
  family->add_option("matrix", matrix_path, "Matrix JSON file")->required();
  family->add_option("--states", states_path, "State set JSON file (phase mode)");
  family->add_option("--phases", phases_csv, "Comma-separated phases (radians)");
  family->add_option("--unitary", unitary_path, "U_0 for the distillation family");

  auto* inconclusive = app.add_subcommand("inconclusive", "Inconclusive-branch analysis");
  inconclusive->add_option("matrix", matrix_path, "Matrix JSON file")->required();
  inconclusive->add_option("--rho", rho_path, "Density matrix JSON (default maximally mixed)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo measurement sampling");
  simulate->add_option("matrix", matrix_path, "Matrix JSON file");
  simulate->add_option("--states", states_path, "State set JSON file");
  simulate->add_option("--distill", distill_path, "Coefficient matrix JSON (distillation mode)");
  simulate->add_option("--shots", shots, "Number of shots");
  simulate->add_option("--seed", seed_flag, "RNG seed (fallback: USDKIT_SEED, then 0)");

  // Let global flags (--output, --tol) appear after the subcommand too.
  for (CLI::App* sub : app.get_subcommands(/*filter=*/[](CLI::App*) { return true; })) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    Json report;
    if (analyze->parsed()) {
      report = cmd_analyze(matrix_path, opt);
    } else if (pair->parsed()) {
      report = cmd_optimal_pair(matrix_path, opt);
    } else if (discriminate->parsed()) {
      report = cmd_discriminate(states_path, weights_csv, unitary_path, opt);
    } else if (distill->parsed()) {
      report = cmd_distill(distill_path, opt);
    } else if (family->parsed()) {
      report = cmd_family(matrix_path, states_path, phases_csv, unitary_path, opt);
    } else if (inconclusive->parsed()) {
      report = cmd_inconclusive(matrix_path, rho_path, opt);
    } else if (simulate->parsed()) {
      report = cmd_simulate(matrix_path, states_path, distill_path, shots,
                            resolve_seed(seed_flag), opt);
    }
    emit(report, opt);
    return 0;
  } catch (const Error& e) {
    Json err;
    err["error"] = usdkit::to_string(e.code());
    err["message"] = e.what();
    std::cerr << usdkit::io::dump(err);
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    Json err;
    err["error"] = "Internal";
    err["message"] = e.what();
    std::cerr << usdkit::io::dump(err);
    return 5;
  }
}
