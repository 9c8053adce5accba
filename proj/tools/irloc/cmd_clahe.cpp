#include <iostream>
#include <memory>

#include "common.hpp"
#include "irloc/clahe.hpp"

namespace irloc::cli {

namespace {
struct ClaheOpts {
  std::string in, out;
  std::string tiles = "8x8";
  double clip = 3.0;
};
}  // namespace

void register_clahe(CLI::App& app) {
  auto opts = std::make_shared<ClaheOpts>();

  CLI::App* cmd = app.add_subcommand("clahe", "contrast-limited adaptive histogram equalization");
  cmd->add_option("--in", opts->in, "input PGM (binary P5, maxval 255)")->required();
  cmd->add_option("--out", opts->out, "output PGM")->required();
  cmd->add_option("--tiles", opts->tiles, "tile grid, e.g. 8x8");
  cmd->add_option("--clip", opts->clip, "clip limit (multiple of the uniform bin height, >= 1)");

  cmd->callback([opts]() {
    const auto [tx, ty] = parse_tiles(opts->tiles);
    const GrayImage img = read_pgm(opts->in);
    const GrayImage out = clahe(img, ClaheParams{tx, ty, opts->clip});
    write_pgm(out, opts->out);
    std::cout << "clahe: " << img.width << "x" << img.height << " -> " << opts->out << "\n";
  });
}

}  // namespace irloc::cli
