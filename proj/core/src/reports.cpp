#include "pnpqkd/reports.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "pnpqkd/errors.hpp"

namespace pnpqkd {

using json = nlohmann::ordered_json;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string config_hash_string(std::string_view canonical_text) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_text)));
  return buf;
}

std::string format_g12(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write output file: " + path);
  return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("failed while writing output file: " + path);
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  finish_output(out, path);
}

constexpr Pol kPols[4] = {Pol::H, Pol::V, Pol::D, Pol::A};
constexpr BellOutcome kOutcomes[2] = {BellOutcome::PsiPlus,
                                      BellOutcome::PsiMinus};

}  // namespace

void write_tally_csv(const std::string& path, const TallyTable& counts,
                     const TallyTable* stddev) {
  auto out = open_output(path);
  out << "pol_a,pol_b,outcome,count,stddev\n";
  for (Pol a : kPols)
    for (Pol b : kPols)
      for (BellOutcome o : kOutcomes) {
        out << pol_name(a) << ',' << pol_name(b) << ',' << outcome_name(o)
            << ',' << format_g12(counts.at(a, b, o)) << ','
            << format_g12(stddev ? stddev->at(a, b, o) : 0.0) << '\n';
      }
  finish_output(out, path);
}

void write_scan_csv(const std::string& path, const ScanCurve& curve) {
  auto out = open_output(path);
  out << "x,y,y_err\n";
  for (std::size_t i = 0; i < curve.x.size(); ++i)
    out << format_g12(curve.x[i]) << ',' << format_g12(curve.y[i]) << ','
        << format_g12(curve.y_err[i]) << '\n';
  finish_output(out, path);
}

void write_qber_json(const std::string& path,
                     const std::vector<QberEntry>& entries) {
  json doc;
  doc["results"] = json::array();
  for (const QberEntry& e : entries) {
    json row;
    row["mu_a"] = e.mu_a;
    row["mu_b"] = e.mu_b;
    row["e_z"] = e.report.e_z;
    row["e_x"] = e.report.e_x;
    row["se_z"] = e.report.se_z;
    row["se_x"] = e.report.se_x;
    row["n_z"] = e.report.n_z;
    row["n_x"] = e.report.n_x;
    doc["results"].push_back(std::move(row));
  }
  write_text(path, doc.dump(2) + "\n");
}

void write_fit_json(const std::string& path, const FitRecord& record) {
  json doc;
  doc["model"] = "y = B - A*cos(k*x - delta)";
  doc["k"] = record.fit.harmonic;
  doc["B"] = record.fit.offset;
  doc["A"] = record.fit.amplitude;
  doc["delta"] = record.fit.phase;
  doc["residual_norm"] = record.fit.residual_norm;
  doc["v_sine"] = record.v_sine;
  if (record.v_hom) doc["v_hom"] = *record.v_hom;
  if (record.v_direct) doc["v_direct"] = *record.v_direct;
  write_text(path, doc.dump(2) + "\n");
}

void write_faraday_json(const std::string& path, const FaradayRecord& record) {
  json doc;
  doc["samples"] = record.samples;
  doc["worst_fidelity"] = record.worst_fidelity;
  doc["worst_sample"] = record.worst_sample;
  doc["passed"] = record.passed;
  write_text(path, doc.dump(2) + "\n");
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  json doc;
  doc["tool_version"] = manifest.tool_version;
  doc["command"] = manifest.command;
  doc["config_hash"] = manifest.config_hash;
  doc["seed"] = manifest.seed;
  doc["engine"] = manifest.engine;
  doc["outputs"] = manifest.outputs;
  doc["duration_ms"] = manifest.duration_ms;
  write_text(path, doc.dump(2) + "\n");
}

}  // namespace pnpqkd
