#include <iostream>
#include <memory>

#include "common.hpp"
#include "irloc/map_file.hpp"

namespace irloc::cli {

namespace {
struct DbBuildOpts {
  std::string vocab;
  std::string frames_dir;
  std::string out;
  std::uint32_t di_levels = 2;
  bool no_descriptors = false;
  // map building
  std::string map_out;
  std::string manifest;
  std::string poses;
  std::string drift = "0,0,0";
};

struct DbQueryOpts {
  std::string db;
  std::string vocab;
  std::string query;
  std::size_t max_results = 5;
  std::string exclude;
  std::uint32_t di_levels = 2;
};
}  // namespace

void register_db_build(CLI::App& app) {
  auto opts = std::make_shared<DbBuildOpts>();

  CLI::App* cmd =
      app.add_subcommand("db-build", "build an inverted-file image database from frames");
  cmd->add_option("--vocab", opts->vocab, "vocabulary (.voc)")->required();
  cmd->add_option("--frames", opts->frames_dir, "directory of frames (*.dsc)")->required();
  cmd->add_option("--out", opts->out, "output database (.idb)")->required();
  cmd->add_option("--di-levels", opts->di_levels, "direct index level (levels above leaves)");
  cmd->add_flag("--no-descriptors", opts->no_descriptors,
                "do not embed descriptor sets (database unusable for geometric verification)");
  cmd->add_option("--map", opts->map_out,
                  "also build a relocalization map (.map); requires --manifest and --poses");
  cmd->add_option("--manifest", opts->manifest, "scenario manifest of the frame pass");
  cmd->add_option("--poses", opts->poses, "pose CSV of the frame pass");
  cmd->add_option("--drift", opts->drift,
                  "total translation drift dx,dy,dz applied linearly along the map pass");

  cmd->callback([opts]() {
    const Vocabulary vocab = load_vocabulary(opts->vocab);
    const auto files = list_descriptor_files(opts->frames_dir);
    if (files.empty()) throw FormatError(opts->frames_dir + ": no .dsc files found");

    ImageDatabase db(vocabulary_fingerprint(vocab));
    std::vector<DescriptorSet> frames;
    frames.reserve(files.size());
    for (const auto& path : files) {
      DescriptorSet set = read_descriptor_set(path);
      auto [bow, fv] = transform(vocab, set, opts->di_levels);
      if (opts->no_descriptors)
        db.add(std::move(bow), std::move(fv));
      else
        db.add(std::move(bow), std::move(fv), set);
      frames.push_back(std::move(set));
    }
    save_database(db, opts->out);
    std::cout << "db-build: " << db.size() << " entries -> " << opts->out << "\n";

    if (opts->map_out.empty()) return;
    if (opts->manifest.empty() || opts->poses.empty())
      throw InvalidArgument("db-build: --map requires --manifest and --poses");

    const Manifest manifest = Manifest::load(opts->manifest);
    const World world = generate_world(world_params_from_manifest(manifest),
                                       world_seed_from_manifest(manifest));
    const auto poses = read_pose_csv(opts->poses);
    if (poses.size() != frames.size())
      throw InvalidArgument("db-build: pose CSV has " + std::to_string(poses.size()) +
                            " entries, frames dir has " + std::to_string(frames.size()));

    std::vector<Observation> pass;
    pass.reserve(frames.size());
    for (std::uint32_t i = 0; i < frames.size(); ++i) {
      if (!frames[i].has_landmark_ids())
        throw InvalidArgument("db-build: --map requires frames with landmark ids");
      Observation obs;
      obs.set = frames[i];
      obs.truth.pose = poses.at(i);
      obs.truth.landmark_ids.assign(frames[i].landmark_ids().begin(),
                                    frames[i].landmark_ids().end());
      pass.push_back(std::move(obs));
    }
    const MapFile map =
        build_map(pass, world, vocab, opts->di_levels, parse_vec3(opts->drift));
    save_map(map, opts->map_out);
    std::cout << "db-build: map with " << map.keyframes.size() << " keyframes, "
              << map.landmarks.size() << " landmarks -> " << opts->map_out << "\n";
  });
}

void register_db_query(CLI::App& app) {
  auto opts = std::make_shared<DbQueryOpts>();

  CLI::App* cmd = app.add_subcommand("db-query", "rank database entries against a query frame");
  cmd->add_option("--db", opts->db, "database (.idb)")->required();
  cmd->add_option("--vocab", opts->vocab, "vocabulary (.voc)")->required();
  cmd->add_option("--query", opts->query, "query frame (.dsc)")->required();
  cmd->add_option("--max-results", opts->max_results, "result count cap");
  cmd->add_option("--exclude", opts->exclude, "inclusive entry id range to exclude, e.g. 100:119");
  cmd->add_option("--di-levels", opts->di_levels, "direct index level");

  cmd->callback([opts]() {
    const Vocabulary vocab = load_vocabulary(opts->vocab);
    const ImageDatabase db = load_database(opts->db, vocab);
    const DescriptorSet query = read_descriptor_set(opts->query);

    std::optional<EntryRange> exclude;
    if (!opts->exclude.empty()) {
      const auto colon = opts->exclude.find(':');
      if (colon == std::string::npos)
        throw CLI::ValidationError("--exclude", "expected first:last");
      exclude = EntryRange{static_cast<std::uint32_t>(std::stoul(opts->exclude.substr(0, colon))),
                           static_cast<std::uint32_t>(std::stoul(opts->exclude.substr(colon + 1)))};
    }

    const BowVector bow = transform(vocab, query, opts->di_levels).first;
    const auto results = db.query(bow, opts->max_results, exclude);
    std::cout << "rank,entry_id,score\n";
    for (std::size_t i = 0; i < results.size(); ++i)
      std::cout << i << "," << results[i].entry_id << "," << results[i].score << "\n";
  });
}

}  // namespace irloc::cli
