#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "cli_impl.hpp"
#include "prodlex/error.hpp"

namespace prodlex::cli {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("PRODLEX_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return v;
    }
    return 1;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"prodlex: product description and product name classification toolkit"};
    app.require_subcommand(1);

    register_data_commands(app);
    register_train_commands(app);
    register_predict_commands(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::cerr << e.what() << "\nRun with --help for usage.\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("prodlex");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace prodlex::cli
