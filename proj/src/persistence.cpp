#include <zlib.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "dewet/evolution.hpp"

namespace dewet {

namespace fs = std::filesystem;

std::string format_ledger(const Trajectory& traj) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  const auto& cols = ledger_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << '\n' << std::setprecision(17);
  for (const auto& r : traj.ledger) {
    const auto v = ledger_values(r);
    os << r.step;
    for (std::size_t k = 1; k < v.size(); ++k) os << ',' << v[k];
    os << '\n';
  }
  return os.str();
}

std::vector<LedgerRow> read_ledger(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty ledger");
  std::vector<LedgerRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    std::vector<double> v;
    std::string cell;
    while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() != ledger_columns().size()) throw std::runtime_error(path + ": bad ledger row");
    LedgerRow r;
    r.step = static_cast<int>(v[0]);
    double* fields[] = {&r.t, &r.alpha, &r.beta, &r.S, &r.E, &r.T, &r.total, &r.m, &r.mass_err, &r.lip_margin,
                        &r.el_residual, &r.contact_res_a, &r.contact_res_b, &r.endpoint_h2, &r.b_tau};
    for (std::size_t k = 0; k < std::size(fields); ++k) *fields[k] = v[k + 1];
    rows.push_back(r);
  }
  return rows;
}

std::uint32_t file_crc32(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  uLong crc = crc32(0L, Z_NULL, 0);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = in.gcount();
    if (got > 0) crc = crc32(crc, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(got));
  }
  return static_cast<std::uint32_t>(crc);
}

namespace {

FileRecord emit(const fs::path& root, const std::string& rel, const std::string& content) {
  const fs::path p = root / rel;
  fs::create_directories(p.parent_path());
  {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << content;
  }
  const uLong crc = crc32(crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(content.data()),
                          static_cast<uInt>(content.size()));
  return {rel, content.size(), static_cast<std::uint32_t>(crc)};
}

std::string step_name(const char* dir, int i) {
  std::ostringstream os;
  os << dir << "/step_" << std::setw(5) << std::setfill('0') << i << ".txt";
  return os.str();
}

}  // namespace

std::vector<FileRecord> write_trajectory(const Trajectory& traj, const std::string& dir, const PersistOptions& opts) {
  const fs::path root(dir);
  fs::create_directories(root);
  std::vector<FileRecord> inv;
  inv.push_back(emit(root, "ledger.csv", format_ledger(traj)));
  for (int i = 0; i < traj.states(); ++i) {
    std::ostringstream os;
    write_profile(os, traj.state(i));
    inv.push_back(emit(root, step_name("profiles", i), os.str()));
    if (opts.write_fields) {
      const DisplacementField& f = i == 0 ? traj.initial_field : traj.steps[i - 1].field;
      std::ostringstream fo;
      write_field(fo, f);
      inv.push_back(emit(root, step_name("fields", i), fo.str()));
    }
  }
  return inv;
}

}  // namespace dewet
