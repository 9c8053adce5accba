// irloc: descriptor-agnostic visual place recognition and relocalization.
#include <iostream>

#include "commands.hpp"
#include "irloc/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"visual place recognition and relocalization engine"};
  app.require_subcommand(1);

  irloc::cli::register_clahe(app);
  irloc::cli::register_simgen(app);
  irloc::cli::register_vocab_train(app);
  irloc::cli::register_db_build(app);
  irloc::cli::register_db_query(app);
  irloc::cli::register_loopdetect(app);
  irloc::cli::register_reloc(app);
  irloc::cli::register_eval_recall(app);
  irloc::cli::register_timelapse(app);
  irloc::cli::register_bench(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage error
  } catch (const irloc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;  // data / format error
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
