#include "lotsizing/mip/lp_writer.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace lotsizing::mip {

namespace {

constexpr int kTermsPerLine = 6;

void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_terms(std::string& out, std::span<const Term> terms, const MipModel& model) {
  int on_line = 0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double c = terms[k].coef;
    if (k > 0 || c < 0.0) out += c < 0.0 ? " - " : " + ";
    else out += ' ';
    append_number(out, std::abs(c));
    out += ' ';
    out += var_name(model.variable(terms[k].var).key);
    if (++on_line == kTermsPerLine && k + 1 < terms.size()) {
      out += "\n   ";
      on_line = 0;
    }
  }
}

}  // namespace

std::string model_to_lp_text(const MipModel& model) {
  std::string out = "\\ lot-sizing model\nMinimize\n obj:";
  std::vector<Term> objective;
  for (int j = 0; j < model.num_variables(); ++j) {
    const double c = model.variable(j).cost;
    if (c != 0.0) objective.push_back({j, c});
  }
  append_terms(out, objective, model);
  out += "\nSubject To\n";
  for (int r = 0; r < model.num_rows(); ++r) {
    out += ' ';
    out += model.row_name(r);
    out += ':';
    const auto terms = model.row_terms(r);
    if (terms.empty()) {
      // The format has no empty rows; a zero coefficient keeps it parseable.
      if (model.num_variables() == 0) continue;
      out += " 0 ";
      out += var_name(model.variable(0).key);
    } else {
      append_terms(out, terms, model);
    }
    switch (model.row_sense(r)) {
      case RowSense::kLessEqual:
        out += " <= ";
        break;
      case RowSense::kGreaterEqual:
        out += " >= ";
        break;
      case RowSense::kEqual:
        out += " = ";
        break;
    }
    append_number(out, model.row_rhs(r));
    out += '\n';
  }
  out += "Bounds\n";
  for (const Variable& v : model.variables()) {
    const std::string name = var_name(v.key);
    out += ' ';
    if (std::isinf(v.lower) && std::isinf(v.upper)) {
      out += name + " free";
    } else if (v.lower == v.upper) {
      out += name + " = ";
      append_number(out, v.lower);
    } else {
      if (std::isinf(v.lower)) {
        out += "-inf";
      } else {
        append_number(out, v.lower);
      }
      out += " <= " + name;
      if (!std::isinf(v.upper)) {
        out += " <= ";
        append_number(out, v.upper);
      }
    }
    out += '\n';
  }
  bool any_binary = false;
  for (const Variable& v : model.variables()) {
    if (!v.binary) continue;
    if (!any_binary) out += "Binaries\n";
    any_binary = true;
    out += ' ' + var_name(v.key) + '\n';
  }
  out += "End\n";
  return out;
}

void export_model_text(const MipModel& model, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << model_to_lp_text(model);
  if (!f) throw std::runtime_error("failed writing " + path);
}

}  // namespace lotsizing::mip
