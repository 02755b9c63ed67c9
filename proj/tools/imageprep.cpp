#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hemo/image.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Grayscale contrast transforms (binary PGM in/out)"};
  app.require_subcommand(1);

  std::string in_path, out_path;
  std::string tiles = "8,8";
  double clip = 2.0;

  auto* eq = app.add_subcommand("equalize", "global histogram equalization");
  eq->add_option("--in", in_path, "input PGM")->required();
  eq->add_option("--out", out_path, "output PGM")->required();

  auto* cl = app.add_subcommand("clahe",
                                "contrast-limited adaptive equalization");
  cl->add_option("--in", in_path, "input PGM")->required();
  cl->add_option("--out", out_path, "output PGM")->required();
  cl->add_option("--tiles", tiles, "tile grid TX,TY (default 8,8)");
  cl->add_option("--clip", clip, "clip limit (default 2.0)");

  CLI11_PARSE(app, argc, argv);

  try {
    const hemo::GrayImage input = hemo::read_pgm(in_path);
    if (eq->parsed()) {
      hemo::write_pgm(hemo::equalize(input).first, out_path);
    } else {
      const auto comma = tiles.find(',');
      if (comma == std::string::npos) {
        throw std::runtime_error("--tiles expects TX,TY");
      }
      const int tx = std::stoi(tiles.substr(0, comma));
      const int ty = std::stoi(tiles.substr(comma + 1));
      hemo::write_pgm(hemo::clahe(input, tx, ty, clip), out_path);
    }
    std::cout << "wrote " << out_path << "\n";
    return 0;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
}
