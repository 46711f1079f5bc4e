// Command-line front end: one subcommand per pipeline, JSON reports plus
// images in the output directory.
//   exit 0  success
//   exit 1  the pipeline ran but could not measure (e.g. decomposition failed)
//   exit 2  invalid invocation or unreadable input

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "fabric/fabric.hpp"
#include "fabric/reference.hpp"
#include "fabric/report.hpp"
#include "fabric/verify.hpp"

namespace fs = std::filesystem;
using fabric::Error;
using fabric::ErrorCode;
using json = nlohmann::json;

namespace {

struct Common {
  std::string input;
  std::string out = ".";
  std::optional<double> scale;
  std::string axis = "both";
  std::string polarity;  // default depends on the subcommand
};

struct PipelineOptions {
  double niblack_k = 0.2;
  int niblack_window = 33;
  int band_half_width = fabric::spectral::kDefaultBandHalfWidth;
  long long min_size = 9;
  std::string method = "canny";
  bool binary = false;
  bool invert_crossings = false;
};

fabric::Illumination parse_illumination(const std::string& s) {
  if (s == "reflected") return fabric::Illumination::Reflected;
  if (s == "transmitted") return fabric::Illumination::Transmitted;
  throw Error(ErrorCode::InvalidParams, "polarity must be reflected or transmitted");
}

std::vector<fabric::YarnAxis> parse_axes(const std::string& s) {
  if (s == "warp") return {fabric::YarnAxis::Warp};
  if (s == "weft") return {fabric::YarnAxis::Weft};
  if (s == "both") return {fabric::YarnAxis::Warp, fabric::YarnAxis::Weft};
  throw Error(ErrorCode::InvalidParams, "axis must be warp, weft or both");
}

fabric::defect::EdgeMethod parse_method(const std::string& s) {
  if (s == "canny") return fabric::defect::EdgeMethod::Canny;
  if (s == "sobel") return fabric::defect::EdgeMethod::Sobel;
  if (s == "prewitt") return fabric::defect::EdgeMethod::Prewitt;
  throw Error(ErrorCode::InvalidParams, "method must be canny, sobel or prewitt");
}

fabric::weave::BoolMatrix parse_weave(const std::string& s) {
  if (s == "plain") return fabric::weave::plain_tile();
  if (s == "twill") return fabric::weave::twill31_tile();
  if (s == "satin") return fabric::weave::satin5_tile(2);
  if (s == "satin3") return fabric::weave::satin5_tile(3);
  throw Error(ErrorCode::InvalidParams, "weave must be plain, twill, satin or satin3");
}

void require_input(const Common& c) {
  if (c.input.empty()) throw Error(ErrorCode::InvalidInput, "no input file given");
  if (!fs::is_regular_file(c.input)) throw Error(ErrorCode::Io, "cannot read input: " + c.input);
}

fs::path out_dir(const Common& c) {
  fs::path dir(c.out);
  fs::create_directories(dir);
  return dir;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + path.string());
  f << j.dump(2) << '\n';
}

void emit(const fs::path& path, const json& j) {
  write_json(path, j);
  std::cout << j.dump(2) << '\n';
}

fabric::imgcore::NiblackParams niblack_params(const PipelineOptions& p) {
  return {p.niblack_window, p.niblack_window, p.niblack_k};
}

// ---------------------------------------------------------------------------

int run_density(const Common& c, const PipelineOptions& p) {
  require_input(c);
  if (!c.scale) throw Error(ErrorCode::InvalidScale, "--scale (cm/pixel) is required");
  const auto axes = parse_axes(c.axis);
  const auto img = fabric::io::read_gray(c.input, c.scale);
  json report{{"input", fs::path(c.input).filename().string()}};
  if (p.binary) {
    // Already thresholded image; yarns to count run vertically.
    fabric::BinaryImage bin(img.width(), img.height(), 0, c.scale);
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) bin.set(x, y, img(x, y) > 127 ? 1 : 0);
    const auto axis = axes.front();
    report[std::string(fabric::to_string(axis))] = fabric::report::to_json(fabric::density::density_from_binary(bin, axis, *c.scale));
  } else {
    fabric::density::DensityParams dp;
    dp.niblack = niblack_params(p);
    dp.band_half_width = p.band_half_width;
    const fs::path dir = out_dir(c);
    for (auto axis : axes) {
      const auto st = fabric::density::density_stages(img, axis, dp);
      const auto res = fabric::density::density_from_binary(st.thresholded, axis, *c.scale, dp.lines);
      const std::string name(fabric::to_string(axis));
      fabric::io::write_image(dir / ("density_" + name + "_spectrum.png"),
                              fabric::spectral::spectrum_display(st.spectrum).values);
      fabric::io::write_image(dir / ("density_" + name + "_reconstructed.png"), st.reconstructed);
      fabric::io::write_image(dir / ("density_" + name + "_binary.png"), st.thresholded);
      report[name] = fabric::report::to_json(res);
    }
    report["parameters"] = {{"niblack_k", p.niblack_k},
                            {"niblack_window_px", p.niblack_window},
                            {"band_half_width", p.band_half_width}};
  }
  emit(out_dir(c) / "density.json", report);
  return 0;
}

int run_decompose(const Common& c, const PipelineOptions& p) {
  require_input(c);
  const auto mode = parse_illumination(c.polarity.empty() ? "reflected" : c.polarity);
  const auto img = fabric::io::read_gray(c.input, c.scale);
  const fs::path dir = out_dir(c);
  json report{{"input", fs::path(c.input).filename().string()}};
  for (auto axis : parse_axes(c.axis)) {
    const std::string name(fabric::to_string(axis));
    const auto sub = fabric::wiener::decompose(img, axis);
    const auto mask = fabric::weave::yarn_mask(sub, mode, p.min_size);
    fabric::io::write_image(dir / ("decompose_" + name + ".png"), sub);
    fabric::io::write_image(dir / ("decompose_" + name + "_binary.png"), mask);
    report[name] = fabric::report::to_json(fabric::wiener::extract_yarn_outlines(mask, axis));
  }
  emit(dir / "decompose.json", report);
  return 0;
}

fabric::RgbImage pattern_overlay(const fabric::GrayImage& img, const fabric::weave::WeaveAnalysis& a) {
  fabric::RgbImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out(x, y) = {img(x, y), img(x, y), img(x, y)};
  for (const auto& s : a.warp.stripes)
    for (int y = 0; y < img.height(); ++y) out(static_cast<int>(s.center()), y) = {0, 160, 0};
  for (const auto& s : a.weft.stripes)
    for (int x = 0; x < img.width(); ++x) out(x, static_cast<int>(s.center())) = {0, 160, 0};
  for (int i = 0; i < a.grid.rows; ++i) {
    for (int j = 0; j < a.grid.cols; ++j) {
      const auto& w = a.grid.cell(i, j).window;
      const fabric::Rgb mark = a.matrix.grid(i, j) ? fabric::Rgb{255, 255, 255} : fabric::Rgb{0, 0, 0};
      const int cx = w.x + w.width / 2;
      const int cy = w.y + w.height / 2;
      for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx)
          if (out.contains(cx + dx, cy + dy)) out(cx + dx, cy + dy) = mark;
    }
  }
  return out;
}

int run_pattern(const Common& c, const PipelineOptions& p) {
  require_input(c);
  fabric::weave::WeaveOptions opts;
  opts.illumination = parse_illumination(c.polarity.empty() ? "reflected" : c.polarity);
  opts.invert_crossings = p.invert_crossings;
  opts.noise_area = p.min_size;
  const auto img = fabric::io::read_gray(c.input, c.scale);
  const auto a = fabric::weave::analyze_weave(img, opts);
  const fs::path dir = out_dir(c);
  fabric::io::write_image(dir / "pattern_overlay.png", pattern_overlay(img, a));
  json report = fabric::report::to_json(a);
  report["input"] = fs::path(c.input).filename().string();
  emit(dir / "pattern.json", report);
  return 0;
}

int run_metrics(const Common& c) {
  require_input(c);
  if (!c.scale) throw Error(ErrorCode::InvalidScale, "--scale (cm/pixel) is required");
  const auto mode = parse_illumination(c.polarity.empty() ? "reflected" : c.polarity);
  const auto img = fabric::io::read_gray(c.input, c.scale);
  const auto warp = fabric::metrics::gap_outlines(img, fabric::YarnAxis::Warp, mode);
  const auto weft = fabric::metrics::gap_outlines(img, fabric::YarnAxis::Weft, mode);
  json report = fabric::report::to_json(fabric::metrics::fabric_metrics(warp, weft));
  report["input"] = fs::path(c.input).filename().string();
  report["outlines"] = {{"warp", fabric::report::to_json(warp)}, {"weft", fabric::report::to_json(weft)}};
  emit(out_dir(c) / "metrics.json", report);
  return 0;
}

int run_defect(const Common& c, const PipelineOptions& p) {
  require_input(c);
  const auto mode = parse_illumination(c.polarity.empty() ? "transmitted" : c.polarity);
  const auto method = parse_method(p.method);
  if (p.min_size < 1) throw Error(ErrorCode::InvalidParams, "--min-size must be >= 1");
  const auto rgb = fabric::io::read_rgb(c.input);
  const auto gray = fabric::imgcore::to_grayscale(rgb, c.scale);
  const auto regions = fabric::defect::segment_defects(gray, p.min_size, mode);
  const auto rep = fabric::defect::defect_report(regions, gray.width(), gray.height(), p.min_size);
  const fs::path dir = out_dir(c);
  fabric::io::write_image(dir / "defect_edges.png", fabric::defect::edge_detect(gray, method));
  fabric::io::write_image(dir / "defect_annotated.png", fabric::defect::annotate(gray, regions));
  json report = fabric::report::to_json(rep);
  report["input"] = fs::path(c.input).filename().string();
  report["edge_method"] = p.method;
  report["polarity_convention"] = std::string(fabric::to_string(mode));
  emit(dir / "defect.json", report);
  return 0;
}

struct SynthOptions {
  double warp_density = 30;
  double weft_density = 30;
  std::optional<double> warp_width_mm;
  std::optional<double> weft_width_mm;
  std::string weave = "plain";
  double noise = 0;
  std::uint64_t seed = 0;
  int width = 512;
  int height = 384;
  std::string defect;
  std::vector<int> defect_rect;
  int defect_level = 0;
  std::string fixture;
  std::string name = "synth";
};

int run_synth(const Common& c, const SynthOptions& o) {
  const fs::path dir(c.out);
  if (!o.fixture.empty()) {
    if (o.fixture != "counting-line") throw Error(ErrorCode::InvalidParams, "unknown fixture: " + o.fixture);
    const auto img = fabric::reference::counting_example_image();
    fs::create_directories(dir);
    fabric::io::write_pgm(dir / (o.name + ".pgm"), img);
    const auto& ex = fabric::reference::kCountingExample;
    emit(dir / (o.name + ".json"), {{"fixture", o.fixture},
                                    {"yarns", ex.yarns},
                                    {"start_px", ex.start_px},
                                    {"end_px", ex.end_px},
                                    {"scale_cm_per_px", ex.scale},
                                    {"image", o.name + ".pgm"}});
    return 0;
  }
  const auto mode = parse_illumination(c.polarity.empty() ? "reflected" : c.polarity);
  auto spec = fabric::synthgen::make_spec(o.warp_density, o.weft_density, parse_weave(o.weave),
                                          c.scale.value_or(fabric::verify::kFixtureScale), mode);
  if (o.warp_width_mm) spec.warp_width_mm = *o.warp_width_mm;
  if (o.weft_width_mm) spec.weft_width_mm = *o.weft_width_mm;
  spec.noise_sigma = o.noise;
  spec.seed = o.seed;
  spec.width = o.width;
  spec.height = o.height;
  fabric::GrayImage img = fabric::synthgen::render_fabric(spec);
  json truth = fabric::report::to_json(spec);
  fs::create_directories(dir);
  if (!o.defect.empty()) {
    fabric::synthgen::DefectKind kind;
    if (o.defect == "hole") kind = fabric::synthgen::DefectKind::Hole;
    else if (o.defect == "stain") kind = fabric::synthgen::DefectKind::Stain;
    else if (o.defect == "slub") kind = fabric::synthgen::DefectKind::Slub;
    else if (o.defect == "float") kind = fabric::synthgen::DefectKind::Float;
    else throw Error(ErrorCode::InvalidParams, "defect must be hole, stain, slub or float");
    if (o.defect_rect.size() != 4) throw Error(ErrorCode::InvalidRegion, "--defect-rect needs x,y,width,height");
    const fabric::Rect r{o.defect_rect[0], o.defect_rect[1], o.defect_rect[2], o.defect_rect[3]};
    auto injected = fabric::synthgen::inject_defect(spec, img, kind, r, o.defect_level);
    img = std::move(injected.image);
    fabric::io::write_image(dir / (o.name + "_defect_mask.png"), injected.mask);
    truth["defect"] = {{"kind", o.defect},
                       {"rect", {{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}}},
                       {"area_px", r.area()},
                       {"percent", 100.0 * static_cast<double>(r.area()) / static_cast<double>(img.size())},
                       {"mask", o.name + "_defect_mask.png"}};
  }
  fabric::io::write_image(dir / (o.name + ".png"), img);
  truth["image"] = o.name + ".png";
  emit(dir / (o.name + ".json"), truth);
  return 0;
}

int run_verify(const Common& c) {
  const auto checks = fabric::verify::run_checks();
  const json report = fabric::verify::to_json(checks);
  fs::create_directories(c.out);
  write_json(fs::path(c.out) / "verify.json", report);
  for (const auto& ch : checks) {
    std::cout << (ch.pass ? "PASS " : "FAIL ") << ch.group << '/' << ch.name << "  measured=" << ch.measured
              << " expected=" << ch.expected << " tol=" << ch.tolerance;
    if (!ch.detail.empty()) std::cout << "  (" << ch.detail << ')';
    std::cout << '\n';
  }
  return report["all_passed"].get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Woven fabric structure analysis"};
  app.require_subcommand(1);

  Common common;
  PipelineOptions pipe;
  SynthOptions synth;

  auto add_common = [&](CLI::App* sub, bool with_input) {
    if (with_input) sub->add_option("input", common.input, "Input image (PNG or PGM)")->required();
    sub->add_option("--out", common.out, "Output directory")->capture_default_str();
    sub->add_option("--scale", common.scale, "Image scale, cm per pixel");
    sub->add_option("--polarity", common.polarity, "Illumination: reflected | transmitted");
  };

  auto* density = app.add_subcommand("density", "Thread density by frequency-domain filtering");
  add_common(density, true);
  density->add_option("--axis", common.axis, "warp | weft | both")->capture_default_str();
  density->add_option("--niblack-k", pipe.niblack_k, "Niblack k")->capture_default_str();
  density->add_option("--niblack-window", pipe.niblack_window, "Niblack window side, px")->capture_default_str();
  density->add_option("--band-halfwidth", pipe.band_half_width, "Band template half width")->capture_default_str();
  density->add_flag("--binary", pipe.binary, "Input is already thresholded (counted yarns vertical)");

  auto* decompose = app.add_subcommand("decompose", "Split into warp-only and weft-only sub-images");
  add_common(decompose, true);
  decompose->add_option("--axis", common.axis, "warp | weft | both")->capture_default_str();
  decompose->add_option("--min-size", pipe.min_size, "Speck removal area, px")->capture_default_str();

  auto* pattern = app.add_subcommand("pattern", "Weave pattern recognition");
  add_common(pattern, true);
  pattern->add_option("--min-size", pipe.min_size, "Speck removal area, px")->capture_default_str();
  pattern->add_flag("--invert-crossings", pipe.invert_crossings, "Swap warp-over / weft-over polarity");

  auto* metrics = app.add_subcommand("metrics", "Yarn diameter, spacing, count and cover factor");
  add_common(metrics, true);

  auto* defect = app.add_subcommand("defect", "Defect segmentation and percent defective area");
  add_common(defect, true);
  defect->add_option("--min-size", pipe.min_size, "Minimum defect area, px")->capture_default_str();
  defect->add_option("--method", pipe.method, "Edge method: canny | sobel | prewitt")->capture_default_str();

  auto* synth_cmd = app.add_subcommand("synth", "Render a synthetic fabric with ground truth");
  add_common(synth_cmd, false);
  synth_cmd->add_option("--warp-density", synth.warp_density, "threads/cm")->capture_default_str();
  synth_cmd->add_option("--weft-density", synth.weft_density, "threads/cm")->capture_default_str();
  synth_cmd->add_option("--warp-width-mm", synth.warp_width_mm, "Warp yarn width, mm");
  synth_cmd->add_option("--weft-width-mm", synth.weft_width_mm, "Weft yarn width, mm");
  synth_cmd->add_option("--weave", synth.weave, "plain | twill | satin | satin3")->capture_default_str();
  synth_cmd->add_option("--noise", synth.noise, "Gaussian noise sigma")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Noise seed")->capture_default_str();
  synth_cmd->add_option("--width", synth.width, "Image width, px")->capture_default_str();
  synth_cmd->add_option("--height", synth.height, "Image height, px")->capture_default_str();
  synth_cmd->add_option("--defect", synth.defect, "hole | stain | slub | float");
  synth_cmd->add_option("--defect-rect", synth.defect_rect, "x,y,width,height")->delimiter(',');
  synth_cmd->add_option("--defect-level", synth.defect_level, "Stain darkening")->capture_default_str();
  synth_cmd->add_option("--fixture", synth.fixture, "Named fixture instead of a render: counting-line");
  synth_cmd->add_option("--name", synth.name, "Base name of the output files")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Replay the reference fixtures and synthetic acceptance suite");
  verify->add_option("--out", common.out, "Output directory")->capture_default_str();
  verify->add_option("--seed", synth.seed, "Unused; fixtures carry fixed seeds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*density) return run_density(common, pipe);
    if (*decompose) return run_decompose(common, pipe);
    if (*pattern) return run_pattern(common, pipe);
    if (*metrics) return run_metrics(common);
    if (*defect) return run_defect(common, pipe);
    if (*synth_cmd) return run_synth(common, synth);
    if (*verify) return run_verify(common);
  } catch (const Error& e) {
    std::cerr << "error [" << fabric::to_string(e.code()) << "]: " << e.what() << '\n';
    return fabric::is_measurement_failure(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
