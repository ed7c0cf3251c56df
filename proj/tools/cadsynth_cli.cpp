#include <cstdio>
#include <iostream>
#include <optional>
#include <regex>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "cadsynth/pipeline.hpp"

namespace {

using namespace cadsynth;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

void apply_profile(RenderProfile &p, const std::optional<std::string> &mode, const std::optional<int> &spp) {
    if (mode) {
        if (*mode == "preview") {
            p.mode = RenderMode::preview;
            p.spp = 1;
        } else {
            p.mode = RenderMode::path_traced;
            if (p.spp == 1) p.spp = 500;
        }
    }
    if (spp) p.spp = *spp;
}

void print_config_error(const ConfigError &e) {
    std::cerr << "configuration has " << e.errors().size() << " error(s):\n";
    for (const auto &m : e.errors()) std::cerr << "  " << m << "\n";
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Synthetic 6D pose dataset generator"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "debug logging");

    const std::vector<std::string> modes{"path_traced", "preview"};

    auto *gen = app.add_subcommand("generate", "render a dataset from a config file");
    std::string gen_config;
    std::optional<std::uint64_t> gen_seed;
    std::optional<int> gen_images, gen_spp;
    std::optional<std::string> gen_out, gen_profile;
    gen->add_option("--config", gen_config, "config JSON")->required()->check(CLI::ExistingFile);
    gen->add_option("--seed", gen_seed, "master seed");
    gen->add_option("--num-images", gen_images, "frame count")->check(CLI::PositiveNumber);
    gen->add_option("--out", gen_out, "output root");
    gen->add_option("--profile", gen_profile, "render profile")->check(CLI::IsMember(modes));
    gen->add_option("--spp", gen_spp, "samples per pixel")->check(CLI::PositiveNumber);

    auto *twin = app.add_subcommand("import-twin", "re-render an existing BOP scene");
    std::string twin_root, twin_out;
    int twin_scene = 0;
    std::optional<std::string> twin_config, twin_profile;
    std::optional<int> twin_spp;
    std::uint64_t twin_seed = 0;
    twin->add_option("--root", twin_root, "source BOP root")->required();
    twin->add_option("--scene", twin_scene, "scene id")->required()->check(CLI::NonNegativeNumber);
    twin->add_option("--out", twin_out, "output root (default: <root>_twin)");
    twin->add_option("--config", twin_config, "config supplying environments and materials")
        ->check(CLI::ExistingFile);
    twin->add_option("--profile", twin_profile, "render profile")->check(CLI::IsMember(modes));
    twin->add_option("--spp", twin_spp, "samples per pixel")->check(CLI::PositiveNumber);
    twin->add_option("--seed", twin_seed, "seed for lights and materials");

    auto *rs = app.add_subcommand("resample-texture", "synthesize a texture from an exemplar");
    std::string rs_exemplar, rs_out, rs_size;
    ResampleOptions rs_opts;
    std::uint64_t rs_seed = 0;
    rs->add_option("--exemplar", rs_exemplar, "exemplar image")->required()->check(CLI::ExistingFile);
    rs->add_option("--out", rs_out, "output image (.png or .hdr)")->required();
    rs->add_option("--size", rs_size, "WxH")->required();
    rs->add_option("--iterations", rs_opts.iterations, "refinement iterations")->check(CLI::NonNegativeNumber);
    rs->add_option("--patch-size", rs_opts.patch_size, "initial patch size")->check(CLI::PositiveNumber);
    rs->add_option("--radius", rs_opts.radius0, "initial search radius")->check(CLI::PositiveNumber);
    rs->add_option("--seed", rs_seed, "seed");

    auto *val = app.add_subcommand("validate", "check a config file");
    std::string val_config;
    val->add_option("--config", val_config, "config JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    }
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

    try {
        if (*val) {
            const DatasetConfig cfg = validate_config(val_config);
            std::cout << "valid: " << cfg.num_images << " images, " << cfg.models.size() << " models, "
                      << cfg.environments.size() << " environments, spp " << cfg.profile.spp << "\n";
            return kExitOk;
        }
        if (*gen) {
            DatasetConfig cfg = validate_config(gen_config);
            if (gen_seed) cfg.seed = *gen_seed;
            if (gen_images) cfg.num_images = *gen_images;
            if (gen_out) cfg.output_root = *gen_out;
            apply_profile(cfg.profile, gen_profile, gen_spp);
            const RunReport r = run_generate(cfg);
            std::cout << "wrote " << r.frames_completed << " frames to " << cfg.output_root.string() << "\n";
            return kExitOk;
        }
        if (*twin) {
            TwinOptions opt;
            opt.source_root = twin_root;
            opt.scene_id = twin_scene;
            opt.output_root = twin_out.empty() ? std::filesystem::path(twin_root + "_twin") : std::filesystem::path(twin_out);
            opt.seed = twin_seed;
            if (twin_config) {
                opt.config = validate_config(*twin_config);
                opt.profile = opt.config->profile;
            }
            apply_profile(opt.profile, twin_profile, twin_spp);
            const RunReport r = run_import_digital_twin(opt);
            std::cout << "wrote " << r.frames_completed << " frames to " << opt.output_root.string() << "\n";
            return kExitOk;
        }
        if (*rs) {
            std::smatch m;
            const std::regex size_re(R"((\d+)[xX](\d+))");
            if (!std::regex_match(rs_size, m, size_re)) {
                std::cerr << "--size must look like 256x256\n";
                return kExitValidation;
            }
            resample_texture_file(rs_exemplar, rs_out, std::stoi(m[1]), std::stoi(m[2]), rs_opts, rs_seed);
            return kExitOk;
        }
    } catch (const ConfigError &e) {
        print_config_error(e);
        return kExitValidation;
    } catch (const SpecError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const FrameError &e) {
        std::cerr << "error: " << e.what() << "\npartial output left in place; see MANIFEST\n";
        return kExitRuntime;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
