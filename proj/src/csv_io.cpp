#include "relerr/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "relerr/errors.hpp"

namespace relerr::io {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void append_row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
}

std::vector<double> parse_row(const std::vector<std::string>& cells, std::size_t from) {
  std::vector<double> v;
  v.reserve(cells.size() - from);
  for (std::size_t i = from; i < cells.size(); ++i) v.push_back(parse_double(cells[i]));
  return v;
}

}  // namespace

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ParseError("not a number: '" + std::string(text) + "'");
  return v;
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io-error", "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("io-error", "failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io-error", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string schema_line(std::string_view kind) {
  return "# schema: relerr." + std::string(kind) + "/v" + std::to_string(kSchemaVersion) + "\n";
}

Table parse_csv(std::string_view text, std::string_view kind) {
  Table t;
  bool first = true;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.starts_with("# schema:")) {
        std::string expected = schema_line(kind);
        expected.pop_back();
        if (!first || line != expected)
          throw ParseError("unsupported schema line '" + std::string(line) + "' (expected '" +
                           expected + "')");
      }
      continue;
    }
    first = false;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw ParseError("ragged row at line " + std::to_string(line_no) + ": " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw ParseError("empty CSV");
  return t;
}

std::string format_curves(std::span<const Curve> curves) {
  if (curves.empty()) throw NoData("no curves to write");
  std::string out = schema_line("curves");
  std::vector<std::string> cells;
  for (double p : curves.front().grid().points()) cells.push_back(format_double(p));
  append_row(out, cells);
  for (const auto& c : curves) {
    if (!same_grid(c, curves.front())) throw GridMismatch("curves do not share one grid");
    cells.clear();
    for (double v : c.values()) cells.push_back(format_double(v));
    append_row(out, cells);
  }
  return out;
}

std::vector<Curve> parse_curves(std::string_view text) {
  const auto t = parse_csv(text, "curves");
  const auto grid = std::make_shared<const Grid>(parse_row(t.header, 0));
  std::vector<Curve> out;
  for (const auto& row : t.rows) out.emplace_back(grid, parse_row(row, 0));
  return out;
}

std::string format_sample(const LtrcSample& sample) {
  std::string out = schema_line("sample");
  std::vector<std::string> cells{"z", "t", "delta"};
  for (double p : sample.grid()->points()) cells.push_back(format_double(p));
  append_row(out, cells);
  for (const auto& r : sample.records()) {
    cells = {format_double(r.z()), format_double(r.t()), r.delta() ? "1" : "0"};
    for (double v : r.curve().values()) cells.push_back(format_double(v));
    append_row(out, cells);
  }
  return out;
}

LtrcSample parse_sample(std::string_view text) {
  const auto t = parse_csv(text, "sample");
  if (t.header.size() < 5 || t.header[0] != "z" || t.header[1] != "t" || t.header[2] != "delta")
    throw ParseError("sample header must start with z,t,delta followed by grid abscissae");
  const auto grid = std::make_shared<const Grid>(parse_row(t.header, 3));
  std::vector<LtrcRecord> records;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    if (row[2] != "0" && row[2] != "1")
      throw ParseError("record " + std::to_string(i) + ": delta must be 0 or 1");
    const double z = parse_double(row[0]);
    const double tt = parse_double(row[1]);
    if (z < tt)
      throw ParseError("record " + std::to_string(i) + ": z < t (truncated record)");
    records.emplace_back(Curve(grid, parse_row(row, 3)), z, tt, row[2] == "1");
  }
  if (records.empty()) throw ParseError("sample has no records");
  return LtrcSample(std::move(records));
}

std::string format_latents(std::span<const Latent> latent) {
  std::string out = schema_line("latents");
  append_row(out, {"id", "y", "s"});
  for (std::size_t i = 0; i < latent.size(); ++i)
    append_row(out, {std::to_string(i), format_double(latent[i].y), format_double(latent[i].s)});
  return out;
}

std::string format_predictions(std::span<const PredictionRow> rows) {
  std::string out = schema_line("predictions");
  append_row(out, {"query_id", "rer", "nw", "neighbors", "flags"});
  for (const auto& r : rows) {
    std::string flags = "ok";
    if (!r.rer.ok() || !r.nw.ok()) flags = "empty-neighborhood";
    append_row(out, {std::to_string(r.query_id), format_double(r.rer.value),
                     format_double(r.nw.value), std::to_string(r.rer.neighbors), flags});
  }
  return out;
}

std::string format_gmse_table(const GmseReport& report) {
  std::string out = schema_line("gmse");
  append_row(out, {"censor_rate", "trunc_rate", "n", "rer", "nw"});
  for (const auto& row : report.rows)
    append_row(out, {format_double(row.scenario.censor), format_double(row.scenario.trunc),
                     std::to_string(row.scenario.n), format_double(row.rer.gmse),
                     format_double(row.nw.gmse)});
  return out;
}

std::string format_influence(std::span<const InfluencePoint> points) {
  std::string out = schema_line("influence");
  append_row(out, {"distance", "eif_rer", "eif_nw"});
  for (const auto& p : points)
    append_row(out, {format_double(p.distance), format_double(p.eif_rer), format_double(p.eif_nw)});
  return out;
}

}  // namespace relerr::io
