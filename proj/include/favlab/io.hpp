#pragma once

#include <map>
#include <string>
#include <vector>

#include "favlab/gap_lemma.hpp"
#include "favlab/measure.hpp"
#include "favlab/planar_set.hpp"

namespace favlab {

/// PlanarSet <-> {"primitives":[{"kind":"segment",...}|{"kind":"box",...}]}
std::string planar_set_to_json(const PlanarSet& set);
PlanarSet planar_set_from_json(const std::string& text);

void write_planar_set(const std::string& path, const PlanarSet& set);
PlanarSet read_planar_set(const std::string& path);

/// DiscreteMeasure CSV with an x,y,w header; `params` are echoed as leading
/// comment lines for reproducibility.
void write_measure_csv(const std::string& path, const DiscreteMeasure& mu,
                       const std::map<std::string, std::string>& params = {});
DiscreteMeasure read_measure_csv(const std::string& path);

std::string gaps_to_json(const std::vector<DyadicInterval>& gaps);

/// Simple key=value config files; '#' starts a comment.
std::map<std::string, std::string> parse_config_file(const std::string& path);
std::map<std::string, std::string> parse_config_text(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);

/// Minimal deterministic SVG emitter for plots and failure renders.
class SvgCanvas {
 public:
  SvgCanvas(double width, double height) : width_(width), height_(height) {}

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double stroke_width = 1.0);
  void rect(double x, double y, double w, double h, const std::string& stroke,
            const std::string& fill = "none");
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke);
  void text(double x, double y, const std::string& s, int size = 12);
  void comment(const std::string& s);

  std::string render() const;

 private:
  double width_;
  double height_;
  std::string body_;
};

/// theta -> projection length plot.
std::string favard_plot_svg(const std::vector<double>& lengths, double favard_value,
                            const std::string& title, bool timestamp);

}  // namespace favlab
