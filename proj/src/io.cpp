#include "favlab/io.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace favlab {

using nlohmann::json;

std::string planar_set_to_json(const PlanarSet& set) {
  json prims = json::array();
  for (const auto& p : set.primitives) {
    if (const auto* s = std::get_if<Segment>(&p)) {
      prims.push_back({{"kind", "segment"},
                       {"a", {s->a.x, s->a.y}},
                       {"b", {s->b.x, s->b.y}},
                       {"mass", s->mass}});
    } else {
      const auto& b = std::get<AxisBox>(p);
      prims.push_back({{"kind", "box"},
                       {"center", {b.center.x, b.center.y}},
                       {"side", b.side},
                       {"mass", b.mass}});
    }
  }
  json root = {{"primitives", prims}};
  return root.dump(2) + "\n";
}

PlanarSet planar_set_from_json(const std::string& text) {
  json root = json::parse(text);
  PlanarSet set;
  for (const auto& p : root.at("primitives")) {
    std::string kind = p.at("kind");
    if (kind == "segment") {
      Segment s;
      s.a = {p.at("a")[0], p.at("a")[1]};
      s.b = {p.at("b")[0], p.at("b")[1]};
      s.mass = p.at("mass");
      set.primitives.push_back(s);
    } else if (kind == "box") {
      AxisBox b;
      b.center = {p.at("center")[0], p.at("center")[1]};
      b.side = p.at("side");
      b.mass = p.at("mass");
      set.primitives.push_back(b);
    } else {
      throw PreconditionViolation("unknown primitive kind: " + kind);
    }
  }
  return set;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void write_planar_set(const std::string& path, const PlanarSet& set) {
  write_text_file(path, planar_set_to_json(set));
}

PlanarSet read_planar_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return planar_set_from_json(ss.str());
}

void write_measure_csv(const std::string& path, const DiscreteMeasure& mu,
                       const std::map<std::string, std::string>& params) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& [k, v] : params) os << "# " << k << "=" << v << "\n";
  os << "# spacing=" << mu.spacing << "\n";
  os << "x,y,w\n";
  for (std::size_t i = 0; i < mu.size(); ++i)
    os << mu.points[i].x << "," << mu.points[i].y << "," << mu.weights[i] << "\n";
  write_text_file(path, os.str());
}

DiscreteMeasure read_measure_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  DiscreteMeasure mu;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("spacing=");
      if (pos != std::string::npos) mu.spacing = std::stod(line.substr(pos + 8));
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // x,y,w
      continue;
    }
    double x = 0, y = 0, w = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &w) != 3)
      throw std::runtime_error("bad CSV row: " + line);
    mu.points.push_back({x, y});
    mu.weights.push_back(w);
    mu.total += w;
  }
  if (mu.spacing <= 0.0 && !mu.points.empty()) mu.spacing = 1.0 / static_cast<double>(mu.size());
  return mu;
}

std::string gaps_to_json(const std::vector<DyadicInterval>& gaps) {
  json arr = json::array();
  for (const auto& g : gaps) arr.push_back({{"depth", g.depth}, {"index", g.index}});
  return arr.dump() + "\n";
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) cfg[key] = val;
  }
  return cfg;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void SvgCanvas::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                     double stroke_width) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.6g\" y1=\"%.6g\" x2=\"%.6g\" y2=\"%.6g\" stroke=\"%s\" "
                "stroke-width=\"%.3g\"/>\n",
                x1, y1, x2, y2, stroke.c_str(), stroke_width);
  body_ += buf;
}

void SvgCanvas::rect(double x, double y, double w, double h, const std::string& stroke,
                     const std::string& fill) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.6g\" y=\"%.6g\" width=\"%.6g\" height=\"%.6g\" stroke=\"%s\" "
                "fill=\"%s\"/>\n",
                x, y, w, h, stroke.c_str(), fill.c_str());
  body_ += buf;
}

void SvgCanvas::polyline(const std::vector<std::pair<double, double>>& pts,
                         const std::string& stroke) {
  body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" points=\"";
  char buf[64];
  for (const auto& [x, y] : pts) {
    std::snprintf(buf, sizeof buf, "%.6g,%.6g ", x, y);
    body_ += buf;
  }
  body_ += "\"/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& s, int size) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "<text x=\"%.6g\" y=\"%.6g\" font-size=\"%d\">", x, y, size);
  body_ += buf;
  body_ += s + "</text>\n";
}

void SvgCanvas::comment(const std::string& s) { body_ += "<!-- " + s + " -->\n"; }

std::string SvgCanvas::render() const {
  char head[160];
  std::snprintf(head, sizeof head,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.6g\" height=\"%.6g\" "
                "viewBox=\"0 0 %.6g %.6g\">\n",
                width_, height_, width_, height_);
  return std::string(head) + body_ + "</svg>\n";
}

std::string favard_plot_svg(const std::vector<double>& lengths, double favard_value,
                            const std::string& title, bool timestamp) {
  double w = 640, h = 360, margin = 40;
  SvgCanvas svg(w, h);
  if (timestamp) {
    std::time_t now = std::time(nullptr);
    svg.comment("generated " + std::to_string(static_cast<long long>(now)));
  }
  double max_len = 1e-12;
  for (double v : lengths) max_len = std::max(max_len, v);
  std::vector<std::pair<double, double>> pts;
  pts.reserve(lengths.size());
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    double x = margin + (w - 2 * margin) * static_cast<double>(i) / lengths.size();
    double y = h - margin - (h - 2 * margin) * lengths[i] / max_len;
    pts.emplace_back(x, y);
  }
  svg.line(margin, h - margin, w - margin, h - margin, "black");
  svg.line(margin, margin, margin, h - margin, "black");
  svg.polyline(pts, "steelblue");
  char label[96];
  std::snprintf(label, sizeof label, "%s  mean=%.6g  max=%.6g", title.c_str(), favard_value,
                max_len);
  svg.text(margin, margin - 10, label);
  return svg.render();
}

}  // namespace favlab
