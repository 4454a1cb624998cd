#pragma once

#include <CLI11.hpp>

namespace sfegacn::cli {

void add_synth_command(CLI::App& app);
void add_embed_command(CLI::App& app);
void add_train_gacn_command(CLI::App& app);
void add_generate_command(CLI::App& app);
void add_detect_command(CLI::App& app);
void add_pointwalk_command(CLI::App& app);
void add_eval_command(CLI::App& app);

} // namespace sfegacn::cli
