#include "xgw/model_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "xgw/error.hpp"
#include "xgw/text_format.hpp"

namespace xgw {
namespace {

[[noreturn]] void bad(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParse, "model file line " + std::to_string(line) + ": " + what);
}

double real(std::string_view text, std::size_t line) {
  const auto v = parse_double(text);
  if (!v) bad(line, "invalid number '" + std::string(text) + "'");
  return *v;
}

std::size_t count(std::string_view text, std::size_t line) {
  const auto v = parse_int(text);
  if (!v || *v < 0) bad(line, "invalid count '" + std::string(text) + "'");
  return static_cast<std::size_t>(*v);
}

}  // namespace

void write_model(std::ostream& out, const FittedModel& m) {
  out << "xgw-model\t" << kModelFormatVersion << '\n';
  out << "competition_id\t" << escape_field(m.competition_id) << '\n';
  out << "n_shots\t" << m.n_shots << '\n';
  out << "n_goals\t" << m.n_goals << '\n';
  out << "converged\t" << (m.converged ? 1 : 0) << '\n';
  out << "iterations\t" << m.iterations << '\n';
  out << "log_likelihood\t" << format_double(m.log_likelihood) << '\n';
  out << "gradient_max_norm\t" << format_double(m.gradient_max_norm) << '\n';
  out << "intercept\t" << format_double(m.intercept) << '\t' << format_double(m.standard_errors[0])
      << '\t' << format_double(m.p_values[0]) << '\n';
  for (std::size_t j = 0; j < m.num_features(); ++j) {
    out << "feature\t" << m.feature_names[j] << '\t' << format_double(m.coefficients[j]) << '\t'
        << format_double(m.feature_means[j]) << '\t' << format_double(m.standard_errors[j + 1])
        << '\t' << format_double(m.p_values[j + 1]) << '\n';
  }
  for (const std::string& w : m.warnings) out << "warning\t" << escape_field(w) << '\n';
  out << "end\n";
}

FittedModel read_model(std::istream& in) {
  FittedModel m;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  bool have_intercept = false;
  bool ended = false;
  double se0 = 0.0, p0 = 0.0;
  std::vector<double> ses, ps;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (ended) bad(line_no, "content after end marker");
    const auto f = split(line, '\t');
    const std::string_view key = f[0];
    auto need = [&](std::size_t n) {
      if (f.size() != n) bad(line_no, "expected " + std::to_string(n) + " fields for " + std::string(key));
    };
    if (!have_header) {
      need(2);
      if (key != "xgw-model") bad(line_no, "not a model file");
      if (count(f[1], line_no) != static_cast<std::size_t>(kModelFormatVersion)) {
        bad(line_no, "unsupported model format version " + std::string(f[1]));
      }
      have_header = true;
      continue;
    }
    if (key == "competition_id") {
      need(2);
      m.competition_id = unescape_field(f[1]);
    } else if (key == "n_shots") {
      need(2);
      m.n_shots = count(f[1], line_no);
    } else if (key == "n_goals") {
      need(2);
      m.n_goals = count(f[1], line_no);
    } else if (key == "converged") {
      need(2);
      m.converged = f[1] == "1";
    } else if (key == "iterations") {
      need(2);
      m.iterations = static_cast<int>(count(f[1], line_no));
    } else if (key == "log_likelihood") {
      need(2);
      m.log_likelihood = real(f[1], line_no);
    } else if (key == "gradient_max_norm") {
      need(2);
      m.gradient_max_norm = real(f[1], line_no);
    } else if (key == "intercept") {
      need(4);
      m.intercept = real(f[1], line_no);
      se0 = real(f[2], line_no);
      p0 = real(f[3], line_no);
      have_intercept = true;
    } else if (key == "feature") {
      need(6);
      m.feature_names.emplace_back(f[1]);
      m.coefficients.push_back(real(f[2], line_no));
      m.feature_means.push_back(real(f[3], line_no));
      ses.push_back(real(f[4], line_no));
      ps.push_back(real(f[5], line_no));
    } else if (key == "warning") {
      need(2);
      m.warnings.push_back(unescape_field(f[1]));
    } else if (key == "end") {
      ended = true;
    } else {
      bad(line_no, "unknown record '" + std::string(key) + "'");
    }
  }
  if (!have_header || !have_intercept || !ended) {
    throw Error(ErrorCode::kParse, "model file is incomplete");
  }
  m.standard_errors = {se0};
  m.standard_errors.insert(m.standard_errors.end(), ses.begin(), ses.end());
  m.p_values = {p0};
  m.p_values.insert(m.p_values.end(), ps.begin(), ps.end());
  return m;
}

void save_model(const std::filesystem::path& path, const FittedModel& model) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  write_model(out, model);
}

FittedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "no model file at " + path.string());
  return read_model(in);
}

nlohmann::json model_to_json(const FittedModel& m) {
  nlohmann::json terms = nlohmann::json::array();
  auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  terms.push_back({{"term", "intercept"},
                   {"coefficient", m.intercept},
                   {"std_error", finite_or_null(m.standard_errors[0])},
                   {"p_value", m.p_values[0]}});
  for (std::size_t j = 0; j < m.num_features(); ++j) {
    terms.push_back({{"term", m.feature_names[j]},
                     {"coefficient", m.coefficients[j]},
                     {"mean", m.feature_means[j]},
                     {"std_error", finite_or_null(m.standard_errors[j + 1])},
                     {"p_value", m.p_values[j + 1]}});
  }
  return {{"competition_id", m.competition_id},
          {"n_shots", m.n_shots},
          {"n_goals", m.n_goals},
          {"log_likelihood", m.log_likelihood},
          {"converged", m.converged},
          {"iterations", m.iterations},
          {"terms", terms},
          {"warnings", m.warnings},
          {"summary", summary_table(m)}};
}

}  // namespace xgw
