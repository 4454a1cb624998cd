#include "commands.hpp"
#include "context.hpp"

#include <sfegacn/error.hpp>
#include <sfegacn/log.hpp>
#include <sfegacn/version.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr const char* kFooter =
    "Environment:\n"
    "  SFEGACN_LOG    log level: debug, info, warn (default), error, off\n"
    "\n"
    "Exit codes:\n"
    "  0 success, 2 usage, 3 config, 4 data format, 5 numeric, 6 I/O, 1 other\n";

} // namespace

int main(int argc, char** argv) {
    using namespace sfegacn;

    CLI::App app{"sfegacn: session-feature embedding, intra-category sample generation and\n"
                 "two-step unknown-attack mining"};
    app.set_version_flag("--version", std::string("sfegacn ") + kVersionString);
    app.footer(kFooter);
    app.require_subcommand(1);

    cli::add_synth_command(app);
    cli::add_embed_command(app);
    cli::add_train_gacn_command(app);
    cli::add_generate_command(app);
    cli::add_detect_command(app);
    cli::add_pointwalk_command(app);
    cli::add_eval_command(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::FileError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return cli::kExitConfig;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return cli::kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return cli::kExitData;
    } catch (const ShapeError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return cli::kExitData;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return cli::kExitNumeric;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return cli::kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitUnexpected;
    }
    return cli::kExitOk;
}
