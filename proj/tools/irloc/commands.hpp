#pragma once

#include <CLI11.hpp>

namespace irloc::cli {

void register_clahe(CLI::App& app);
void register_simgen(CLI::App& app);
void register_vocab_train(CLI::App& app);
void register_db_build(CLI::App& app);
void register_db_query(CLI::App& app);
void register_loopdetect(CLI::App& app);
void register_reloc(CLI::App& app);
void register_eval_recall(CLI::App& app);
void register_timelapse(CLI::App& app);
void register_bench(CLI::App& app);

}  // namespace irloc::cli
