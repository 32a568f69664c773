#include "commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <sstream>

#include "apery/errors.hpp"
#include "apery/family.hpp"
#include "apery/lattice.hpp"
#include "apery/serialize.hpp"
#include "cache.hpp"
#include "search.hpp"

namespace apery::cli {

namespace {

struct FamilyArgs {
  std::string kind, params, kind_flag, params_flag;

  void attach(CLI::App* cmd) {
    cmd->add_option("FAMILY", kind, "log1, logratio, zeta2 or zeta3k");
    cmd->add_option("PARAMS", params, "comma-separated rationals");
    cmd->add_option("--family", kind_flag, "family (instead of the positional)");
    cmd->add_option("--params", params_flag, "parameters (instead of the positional)");
  }
  IntegralFamily get() const {
    const std::string& k = kind_flag.empty() ? kind : kind_flag;
    const std::string& p = params_flag.empty() ? params : params_flag;
    if (k.empty() || p.empty()) throw UsageError("a family and its parameters are required");
    return IntegralFamily::parse(k, p);
  }
};

Cache open_cache(const std::string& dir) { return dir.empty() ? Cache() : Cache(dir); }

// Significant digits in a decimal literal.
int significant_digits(const std::string& s) {
  int n = 0;
  bool leading = true;
  for (char ch : s) {
    if (ch == 'e' || ch == 'E') break;
    if (ch < '0' || ch > '9') continue;
    if (leading && ch == '0') continue;
    leading = false;
    ++n;
  }
  return n;
}

void print_identification(std::ostream& out, const std::optional<Identification>& id) {
  if (!id) {
    out << "unidentified\n";
    return;
  }
  out << "C = " << id->str() << "\n"
      << "  kind: " << kind_name(id->kind) << "\n"
      << "  residual: " << id->residual.str(3) << " at " << id->verification_precision << " digits\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Apery-style irrationality certificates for Beukers-type integrals"};
  app.require_subcommand(1);

  std::string cache_dir;
  int prec = 100;
  unsigned jobs = 1;

  auto* eval = app.add_subcommand("eval", "print the normalized integral I(n)");
  FamilyArgs eval_f;
  eval_f.attach(eval);
  unsigned eval_n = 0;
  eval->add_option("--n", eval_n, "index n")->capture_default_str();
  eval->add_option("--prec", prec, "digits")->capture_default_str();
  eval->add_option("--jobs", jobs, "quadrature threads")->capture_default_str();

  auto* certify = app.add_subcommand("certify", "run the full pipeline for one family");
  FamilyArgs cert_f;
  cert_f.attach(certify);
  unsigned terms = 2000;
  unsigned max_degree = 10;
  std::string out_path;
  certify->add_option("--terms", terms, "exact terms")->capture_default_str();
  certify->add_option("--prec", prec, "digits")->capture_default_str();
  certify->add_option("--max-degree", max_degree, "largest recurrence degree tried")->capture_default_str();
  certify->add_option("--jobs", jobs, "quadrature threads")->capture_default_str();
  certify->add_option("--cache-dir", cache_dir, "cache directory")->envname("CACHE_DIR");
  certify->add_option("--out", out_path, "certificate JSON path");

  auto* search = app.add_subcommand("search", "certify a parameter grid and cluster the constants");
  std::string search_kind;
  SearchJob job;
  std::string numerators;
  search->add_option("FAMILY", search_kind, "family kind");
  search->add_option("--family", search_kind, "family kind");
  search->add_option("--denominator", job.denominator, "common denominator")->required();
  search->add_option("--numerators", numerators, "numerator range lo:hi (default -(D-1):(D-1))");
  search->add_option("--terms", terms, "exact terms")->capture_default_str();
  search->add_option("--prec", prec, "digits")->capture_default_str();
  search->add_option("--jobs", jobs, "parallel tuples")->capture_default_str();
  search->add_option("--cache-dir", cache_dir, "cache directory")->envname("CACHE_DIR");
  search->add_option("--out", out_path, "report path (JSON; a .txt copy is written next to it)");

  auto* identify = app.add_subcommand("identify", "identify a decimal value or a certificate's constant");
  std::string target;
  identify->add_option("VALUE", target, "decimal value or certificate path")->required();
  identify->add_option("--prec", prec, "digits")->capture_default_str();

  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? ExitCode::ok : ExitCode::usage;
  }

  try {
    if (*eval) {
      IntegralFamily f = eval_f.get();
      QuadratureOptions q;
      q.threads = jobs;
      try {
        auto r = family_integral(f, eval_n, prec, q);
        out << r.value.str(prec) << "\n";
      } catch (const ConvergenceError& e) {
        throw PipelineError(Stage::quadrature, e.what());
      }
    } else if (*certify) {
      IntegralFamily f = cert_f.get();
      Cache cache = open_cache(cache_dir);
      PipelineOptions opt;
      opt.quadrature.threads = jobs;
      opt.max_degree = max_degree;
      opt.log = [&](const std::string& m) { err << m << "\n"; };
      SearchEntry e = certify_cached(f, terms, prec, cache, opt);
      if (e.failure) {
        err << "pipeline failed at stage " << e.failure->message << "\n";
        return ExitCode::pipeline;
      }
      out << theorem_block(*e.certificate);
      if (!out_path.empty()) write_atomic(out_path, certificate_to_json(*e.certificate) + "\n");
    } else if (*search) {
      if (search_kind.empty()) throw UsageError("search needs a family kind");
      job.kind = parse_family_kind(search_kind);
      if (!numerators.empty()) {
        auto colon = numerators.find(':');
        if (colon == std::string::npos) throw UsageError("--numerators takes lo:hi");
        try {
          job.lo = std::stol(numerators.substr(0, colon));
          job.hi = std::stol(numerators.substr(colon + 1));
        } catch (const std::exception&) {
          throw UsageError("--numerators takes integers lo:hi");
        }
      }
      job.digits = prec;
      job.terms = terms;
      job.jobs = jobs;
      Cache cache = open_cache(cache_dir);
      auto report = run_search(job, cache, [&](const std::string& m) { err << m << "\n"; });
      std::string text = report_text(report);
      out << text;
      if (!out_path.empty()) {
        write_atomic(out_path, report_json(report) + "\n");
        write_atomic(out_path + ".txt", text);
      }
    } else if (*identify) {
      std::optional<Identification> id;
      if (std::filesystem::is_regular_file(target)) {
        auto cert = certificate_from_json(read_file(target));
        id = identify_constant(certificate_constant(cert, prec + 40), prec);
      } else {
        const int sig = significant_digits(target);
        const int digits = std::min(prec, sig - 40);
        if (digits < 60)
          throw UsageError("identification needs at least 100 significant digits (got " + std::to_string(sig) +
                           ")");
        id = identify_constant(Real::parse(target, sig), digits);
      }
      print_identification(out, id);
    }
  } catch (const PipelineError& e) {
    err << "pipeline failed at stage " << e.what() << "\n";
    return ExitCode::pipeline;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return ExitCode::io;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return ExitCode::usage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\n";
    return ExitCode::usage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::pipeline;
  }
  return ExitCode::ok;
}

}  // namespace apery::cli
