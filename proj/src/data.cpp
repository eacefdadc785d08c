// Copyright 2026 The moofair Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "moofair/data.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "moofair/log.hpp"
#include "moofair/text.hpp"

namespace moofair {
namespace fs = std::filesystem;

namespace {

const std::vector<std::string>& movielens_genres() {
  static const std::vector<std::string> names = {
      "Action", "Adventure", "Animation", "Children's", "Comedy",  "Crime",
      "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror", "Musical",
      "Mystery", "Romance", "Sci-Fi", "Thriller", "War", "Western"};
  return names;
}

std::optional<Gender> parse_gender(std::string_view s) {
  s = text::trim(s);
  if (s == "F" || s == "f") {
    return Gender::female;
  }
  if (s == "M" || s == "m") {
    return Gender::male;
  }
  return std::nullopt;
}

std::optional<int> parse_age(std::string_view s) {
  s = text::trim(s);
  if (s.empty()) {
    return std::nullopt;
  }
  try {
    return static_cast<int>(text::parse_int(s));
  } catch (const InputError&) {
    return std::nullopt;
  }
}

// Calls `fn(fields, line_number)` for every non-blank line, converting
// field-level errors into ParseError with the line number.
template <typename Fn>
void for_each_record(const fs::path& file, std::string_view delimiter, std::size_t min_fields, Fn fn) {
  const auto lines = text::read_lines(file);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (text::trim(lines[n]).empty()) {
      continue;
    }
    const auto fields = text::split(lines[n], delimiter);
    if (fields.size() < min_fields) {
      throw ParseError(file.string(), n + 1,
                       "expected at least " + std::to_string(min_fields) + " fields, got " +
                           std::to_string(fields.size()));
    }
    try {
      fn(fields, n + 1);
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(file.string(), n + 1, e.what());
    }
  }
}

std::vector<RatingRecord> read_ratings(const fs::path& file, std::string_view delimiter) {
  std::vector<RatingRecord> records;
  for_each_record(file, delimiter, 4, [&](const auto& f, std::size_t) {
    records.push_back({text::parse_int(f[0]), text::parse_int(f[1]), text::parse_double(f[2]),
                       text::parse_int(f[3])});
  });
  return records;
}

void ingest_ml100k(const fs::path& dir, RawDataset& raw) {
  raw.records = read_ratings(dir / "u.data", "\t");
  if (fs::exists(dir / "u.user")) {
    std::map<std::int64_t, UserInfo> users;
    for_each_record(dir / "u.user", "|", 3, [&](const auto& f, std::size_t) {
      users[text::parse_int(f[0])] = {parse_gender(f[2]), parse_age(f[1])};
    });
    raw.users = std::move(users);
  }
  if (fs::exists(dir / "u.item")) {
    // id | title | release date | video date | url | 19 genre flags, the first "unknown".
    constexpr std::size_t kFlags = 19;
    std::map<std::int64_t, std::vector<int>> genres;
    for_each_record(dir / "u.item", "|", kFlags + 1, [&](const auto& f, std::size_t) {
      std::vector<int> g;
      const std::size_t first = f.size() - kFlags;
      for (std::size_t k = 1; k < kFlags; ++k) {
        if (text::parse_int(f[first + k]) != 0) {
          g.push_back(static_cast<int>(k - 1));
        }
      }
      genres[text::parse_int(f[0])] = std::move(g);
    });
    raw.genre_names = movielens_genres();
    raw.item_genres = std::move(genres);
  }
}

// Resolves a genre name to its column, appending names outside the list.
int genre_index(std::vector<std::string>& names, std::string_view name) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it != names.end()) {
    return static_cast<int>(it - names.begin());
  }
  names.emplace_back(name);
  return static_cast<int>(names.size() - 1);
}

void ingest_ml1m(const fs::path& dir, RawDataset& raw) {
  raw.records = read_ratings(dir / "ratings.dat", "::");
  if (fs::exists(dir / "users.dat")) {
    std::map<std::int64_t, UserInfo> users;
    for_each_record(dir / "users.dat", "::", 3, [&](const auto& f, std::size_t) {
      users[text::parse_int(f[0])] = {parse_gender(f[1]), parse_age(f[2])};
    });
    raw.users = std::move(users);
  }
  if (fs::exists(dir / "movies.dat")) {
    std::vector<std::string> names = movielens_genres();
    std::map<std::int64_t, std::vector<int>> genres;
    for_each_record(dir / "movies.dat", "::", 3, [&](const auto& f, std::size_t) {
      std::vector<int> g;
      for (const auto name : text::split(text::trim(f.back()), "|")) {
        const auto trimmed = text::trim(name);
        if (!trimmed.empty() && trimmed != "unknown" && trimmed != "(no genres listed)") {
          g.push_back(genre_index(names, trimmed));
        }
      }
      std::sort(g.begin(), g.end());
      genres[text::parse_int(f[0])] = std::move(g);
    });
    raw.genre_names = std::move(names);
    raw.item_genres = std::move(genres);
  }
}

// generic_tsv directory layout:
//   ratings.tsv  user \t item \t rating \t timestamp   (required)
//   users.tsv    user \t gender(F|M) \t age           (optional, empty fields = unknown)
//   items.tsv    item \t genre|genre|...              (optional)
void ingest_generic(const fs::path& path, RawDataset& raw) {
  if (!fs::is_directory(path)) {
    raw.records = read_ratings(path, "\t");
    return;
  }
  raw.records = read_ratings(path / "ratings.tsv", "\t");
  if (fs::exists(path / "users.tsv")) {
    std::map<std::int64_t, UserInfo> users;
    for_each_record(path / "users.tsv", "\t", 1, [&](const auto& f, std::size_t) {
      UserInfo info;
      if (f.size() > 1) {
        info.gender = parse_gender(f[1]);
      }
      if (f.size() > 2) {
        info.age = parse_age(f[2]);
      }
      users[text::parse_int(f[0])] = info;
    });
    raw.users = std::move(users);
  }
  if (fs::exists(path / "items.tsv")) {
    std::vector<std::string> names;
    std::map<std::int64_t, std::vector<int>> genres;
    for_each_record(path / "items.tsv", "\t", 1, [&](const auto& f, std::size_t) {
      std::vector<int> g;
      if (f.size() > 1) {
        for (const auto name : text::split(f[1], "|")) {
          const auto trimmed = text::trim(name);
          if (!trimmed.empty()) {
            g.push_back(genre_index(names, trimmed));
          }
        }
      }
      std::sort(g.begin(), g.end());
      g.erase(std::unique(g.begin(), g.end()), g.end());
      genres[text::parse_int(f[0])] = std::move(g);
    });
    raw.genre_names = std::move(names);
    raw.item_genres = std::move(genres);
  }
}

}  // namespace

DatasetFormat parse_dataset_format(std::string_view name) {
  if (name == "ml100k") {
    return DatasetFormat::ml100k;
  }
  if (name == "ml1m") {
    return DatasetFormat::ml1m;
  }
  if (name == "generic_tsv" || name == "tsv") {
    return DatasetFormat::generic_tsv;
  }
  throw InputError("unknown dataset format '" + std::string(name) + "' (ml100k, ml1m, generic_tsv)");
}

std::optional<int> age_group(int age_years) {
  if (age_years < 0) {
    return std::nullopt;
  }
  static constexpr int kLowerBounds[kNumAgeGroups] = {0, 18, 25, 35, 45, 50, 56};
  int group = 0;
  for (int g = 0; g < kNumAgeGroups; ++g) {
    if (age_years >= kLowerBounds[g]) {
      group = g;
    }
  }
  return group;
}

std::size_t RawDataset::num_users() const {
  std::set<std::int64_t> ids;
  for (const auto& r : records) {
    ids.insert(r.user);
  }
  return ids.size();
}

std::size_t RawDataset::num_items() const {
  std::set<std::int64_t> ids;
  for (const auto& r : records) {
    ids.insert(r.item);
  }
  return ids.size();
}

RawDataset ingest(const fs::path& path, DatasetFormat format) {
  if (!fs::exists(path)) {
    throw InputError("input path does not exist: " + path.string());
  }
  RawDataset raw;
  switch (format) {
    case DatasetFormat::ml100k:
      ingest_ml100k(path, raw);
      break;
    case DatasetFormat::ml1m:
      ingest_ml1m(path, raw);
      break;
    case DatasetFormat::generic_tsv:
      ingest_generic(path, raw);
      break;
  }
  return raw;
}

std::string_view split_name(Split split) {
  switch (split) {
    case Split::train:
      return "train";
    case Split::val:
      return "val";
    case Split::test:
      return "test";
  }
  return "?";
}

InteractionDataset::InteractionDataset(Index num_users, Index num_items, std::vector<Interaction> interactions,
                                       std::vector<std::int64_t> user_raw_ids,
                                       std::vector<std::int64_t> item_raw_ids, UserAttributes users,
                                       ItemAttributes items)
    : num_users_(num_users),
      num_items_(num_items),
      interactions_(std::move(interactions)),
      user_raw_ids_(std::move(user_raw_ids)),
      item_raw_ids_(std::move(item_raw_ids)),
      users_(std::move(users)),
      items_(std::move(items)) {
  for (auto& per_split : by_split_) {
    per_split.assign(static_cast<std::size_t>(num_users_), {});
  }
  for (const auto& x : interactions_) {
    if (x.user < 0 || x.user >= num_users_ || x.item < 0 || x.item >= num_items_) {
      throw InputError("interaction id out of range");
    }
    by_split_[static_cast<std::size_t>(x.split)][static_cast<std::size_t>(x.user)].push_back(x.item);
  }
  for (auto& per_split : by_split_) {
    for (auto& items_of_user : per_split) {
      std::sort(items_of_user.begin(), items_of_user.end());
    }
  }
}

bool InteractionDataset::is_train_positive(Index user, Index item) const {
  const auto& v = items_of(user, Split::train);
  return std::binary_search(v.begin(), v.end(), static_cast<std::int32_t>(item));
}

bool InteractionDataset::is_seen(Index user, Index item) const {
  if (is_train_positive(user, item)) {
    return true;
  }
  const auto& v = items_of(user, Split::val);
  return std::binary_search(v.begin(), v.end(), static_cast<std::int32_t>(item));
}

std::size_t InteractionDataset::count(Split split) const {
  std::size_t total = 0;
  for (const auto& v : by_split_[static_cast<std::size_t>(split)]) {
    total += v.size();
  }
  return total;
}

std::string_view split_order_name(SplitOrder order) {
  return order == SplitOrder::random ? "random" : "chronological";
}

SplitOrder parse_split_order(std::string_view name) {
  if (name == "chronological") {
    return SplitOrder::chronological;
  }
  if (name == "random") {
    return SplitOrder::random;
  }
  throw InputError("unknown split order '" + std::string(name) + "' (expected chronological or random)");
}

InteractionDataset preprocess(const RawDataset& raw, const PreprocessOptions& options) {
  std::vector<RatingRecord> positives;
  for (const auto& r : raw.records) {
    if (r.rating >= kPositiveRatingThreshold) {
      positives.push_back(r);
    }
  }

  std::map<std::int64_t, std::size_t> item_counts;
  for (const auto& r : positives) {
    ++item_counts[r.item];
  }
  std::erase_if(positives, [&](const RatingRecord& r) { return item_counts[r.item] < kMinItemRatings; });

  std::map<std::int64_t, std::size_t> user_counts;
  for (const auto& r : positives) {
    ++user_counts[r.user];
  }
  std::erase_if(positives, [&](const RatingRecord& r) { return user_counts[r.user] < kMinUserRatings; });

  if (positives.empty()) {
    throw EmptyDatasetError("dataset is empty after filtering");
  }

  // Dense ids follow ascending raw ids.
  std::map<std::int64_t, std::int32_t> user_ids;
  std::map<std::int64_t, std::int32_t> item_ids;
  for (const auto& r : positives) {
    user_ids.emplace(r.user, 0);
    item_ids.emplace(r.item, 0);
  }
  std::vector<std::int64_t> user_raw;
  std::vector<std::int64_t> item_raw;
  for (auto& [raw_id, dense] : user_ids) {
    dense = static_cast<std::int32_t>(user_raw.size());
    user_raw.push_back(raw_id);
  }
  for (auto& [raw_id, dense] : item_ids) {
    dense = static_cast<std::int32_t>(item_raw.size());
    item_raw.push_back(raw_id);
  }

  std::vector<std::vector<Interaction>> per_user(user_raw.size());
  for (const auto& r : positives) {
    const auto u = user_ids.at(r.user);
    per_user[static_cast<std::size_t>(u)].push_back({u, item_ids.at(r.item), r.timestamp, Split::train});
  }

  std::vector<Interaction> interactions;
  interactions.reserve(positives.size());
  SeededRng rng(options.seed);
  for (auto& history : per_user) {
    std::sort(history.begin(), history.end(), [](const Interaction& a, const Interaction& b) {
      return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.item < b.item;
    });
    if (options.order == SplitOrder::random) {
      for (std::size_t k = history.size(); k > 1; --k) {
        std::swap(history[k - 1], history[static_cast<std::size_t>(rng.uniform_index(static_cast<std::int64_t>(k)))]);
      }
    }
    const std::size_t c = history.size();
    const std::size_t n_train = (7 * c) / 10;
    const std::size_t n_val = c / 10;
    for (std::size_t k = 0; k < c; ++k) {
      history[k].split = k < n_train ? Split::train : (k < n_train + n_val ? Split::val : Split::test);
      interactions.push_back(history[k]);
    }
  }

  UserAttributes users;
  if (raw.users) {
    users.gender.resize(user_raw.size());
    users.age_group.resize(user_raw.size());
    for (std::size_t u = 0; u < user_raw.size(); ++u) {
      const auto it = raw.users->find(user_raw[u]);
      if (it == raw.users->end()) {
        continue;
      }
      users.gender[u] = it->second.gender;
      if (it->second.age) {
        users.age_group[u] = age_group(*it->second.age);
      }
    }
    users.has_gender = true;
    users.has_age = true;
  }

  ItemAttributes items;
  if (raw.item_genres) {
    items.genre_names = raw.genre_names;
    items.genres.resize(item_raw.size());
    for (std::size_t i = 0; i < item_raw.size(); ++i) {
      const auto it = raw.item_genres->find(item_raw[i]);
      if (it != raw.item_genres->end()) {
        items.genres[i] = it->second;
      }
    }
    items.has_genres = true;
  }

  const auto num_users = static_cast<Index>(user_raw.size());
  const auto num_items = static_cast<Index>(item_raw.size());
  return InteractionDataset(num_users, num_items, std::move(interactions), std::move(user_raw), std::move(item_raw),
                            std::move(users), std::move(items));
}

std::vector<int> popularity_groups(const std::vector<std::size_t>& counts) {
  const std::size_t n = counts.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });

  const std::size_t base = n / kNumPopularityGroups;
  const std::size_t extra = n % kNumPopularityGroups;
  std::vector<int> group(n, 0);
  std::size_t pos = 0;
  // Most popular group first; it takes the first leftover item.
  for (int rank = 0; rank < kNumPopularityGroups; ++rank) {
    const std::size_t size = base + (static_cast<std::size_t>(rank) < extra ? 1 : 0);
    for (std::size_t k = 0; k < size; ++k) {
      group[order[pos++]] = kMostPopularGroup - rank;
    }
  }
  return group;
}

GroupMaskSet build_masks(const InteractionDataset& dataset) {
  const Index m = dataset.num_users();
  const Index n = dataset.num_items();
  GroupMaskSet masks;

  const auto& users = dataset.users();
  if (users.has_gender) {
    MatrixXd g = MatrixXd::Zero(kNumGenders, m);
    std::size_t unknown = 0;
    for (Index u = 0; u < m; ++u) {
      const auto& v = users.gender[static_cast<std::size_t>(u)];
      if (v) {
        g(static_cast<Index>(*v), u) = 1.0;
      } else {
        ++unknown;
      }
    }
    if (unknown > 0) {
      log::warn(std::to_string(unknown) + " user(s) with unknown gender excluded from the gender mask");
    }
    masks.gender = std::move(g);
  }
  if (users.has_age) {
    MatrixXd a = MatrixXd::Zero(kNumAgeGroups, m);
    std::size_t unknown = 0;
    for (Index u = 0; u < m; ++u) {
      const auto& v = users.age_group[static_cast<std::size_t>(u)];
      if (v) {
        a(*v, u) = 1.0;
      } else {
        ++unknown;
      }
    }
    if (unknown > 0) {
      log::warn(std::to_string(unknown) + " user(s) with unknown age excluded from the age masks");
    }
    masks.age = std::move(a);
  }

  std::vector<std::size_t> counts(static_cast<std::size_t>(n), 0);
  for (const auto& x : dataset.interactions()) {
    if (x.split == Split::train) {
      ++counts[static_cast<std::size_t>(x.item)];
    }
  }
  const auto groups = popularity_groups(counts);
  masks.popularity = MatrixXd::Zero(kNumPopularityGroups, n);
  for (Index i = 0; i < n; ++i) {
    masks.popularity(groups[static_cast<std::size_t>(i)], i) = 1.0;
  }

  const auto& items = dataset.items();
  if (items.has_genres) {
    const auto g = static_cast<Index>(items.genre_names.size());
    MatrixXd mask = MatrixXd::Zero(g, n);
    for (Index i = 0; i < n; ++i) {
      for (const int k : items.genres[static_cast<std::size_t>(i)]) {
        mask(k, i) = 1.0;
      }
    }
    masks.genre = std::move(mask);
  }
  return masks;
}

DatasetStats compute_stats(const RawDataset& raw, const InteractionDataset& dataset) {
  DatasetStats s;
  s.raw_records = raw.records.size();
  s.raw_users = raw.num_users();
  s.raw_items = raw.num_items();
  s.users = static_cast<std::size_t>(dataset.num_users());
  s.items = static_cast<std::size_t>(dataset.num_items());
  s.interactions = dataset.interactions().size();
  s.density = static_cast<double>(s.interactions) / (static_cast<double>(s.users) * static_cast<double>(s.items));
  return s;
}

void write_stats(const fs::path& file, const DatasetStats& s) {
  std::string out;
  out += "raw_records = " + std::to_string(s.raw_records) + "\n";
  out += "raw_users = " + std::to_string(s.raw_users) + "\n";
  out += "raw_items = " + std::to_string(s.raw_items) + "\n";
  out += "users = " + std::to_string(s.users) + "\n";
  out += "items = " + std::to_string(s.items) + "\n";
  out += "interactions = " + std::to_string(s.interactions) + "\n";
  out += "density = " + text::format_report(s.density) + "\n";
  text::write_file(file, out);
}

void save_bundle(const fs::path& dir, const InteractionDataset& dataset, const GroupMaskSet& masks) {
  fs::create_directories(dir);

  std::string inter = "user,item,timestamp,split\n";
  for (const auto& x : dataset.interactions()) {
    inter += std::to_string(x.user) + ',' + std::to_string(x.item) + ',' + std::to_string(x.timestamp) + ',' +
             std::string(split_name(x.split)) + '\n';
  }
  text::write_file(dir / "interactions.csv", inter);

  const auto& ua = dataset.users();
  std::string users = "user,raw_id,gender,age_group\n";
  for (Index u = 0; u < dataset.num_users(); ++u) {
    const auto k = static_cast<std::size_t>(u);
    users += std::to_string(u) + ',' + std::to_string(dataset.user_raw_ids()[k]) + ',';
    if (ua.has_gender && ua.gender[k]) {
      users += *ua.gender[k] == Gender::female ? "F" : "M";
    }
    users += ',';
    if (ua.has_age && ua.age_group[k]) {
      users += std::to_string(*ua.age_group[k]);
    }
    users += '\n';
  }
  text::write_file(dir / "users.csv", users);

  const auto& ia = dataset.items();
  std::string items = "item,raw_id,genres\n";
  for (Index i = 0; i < dataset.num_items(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    items += std::to_string(i) + ',' + std::to_string(dataset.item_raw_ids()[k]) + ',';
    if (ia.has_genres) {
      for (std::size_t g = 0; g < ia.genres[k].size(); ++g) {
        items += (g ? "|" : "") + std::to_string(ia.genres[k][g]);
      }
    }
    items += '\n';
  }
  text::write_file(dir / "items.csv", items);

  std::string genres = "genre,name\n";
  for (std::size_t g = 0; g < ia.genre_names.size(); ++g) {
    genres += std::to_string(g) + ',' + ia.genre_names[g] + '\n';
  }
  text::write_file(dir / "genres.csv", genres);

  std::string meta;
  meta += "users = " + std::to_string(dataset.num_users()) + "\n";
  meta += "items = " + std::to_string(dataset.num_items()) + "\n";
  meta += std::string("has_gender = ") + (ua.has_gender ? "1" : "0") + "\n";
  meta += std::string("has_age = ") + (ua.has_age ? "1" : "0") + "\n";
  meta += std::string("has_genres = ") + (ia.has_genres ? "1" : "0") + "\n";
  text::write_file(dir / "bundle.txt", meta);

  text::write_matrix_csv(dir / "popularity_mask.csv", masks.popularity, false);
  if (masks.gender) {
    text::write_matrix_csv(dir / "gender_mask.csv", *masks.gender, false);
  }
  if (masks.age) {
    text::write_matrix_csv(dir / "age_mask.csv", *masks.age, false);
  }
  if (masks.genre) {
    text::write_matrix_csv(dir / "genre_mask.csv", *masks.genre, false);
  }
}

namespace {

std::map<std::string, std::string> read_key_values(const fs::path& file) {
  std::map<std::string, std::string> kv;
  for (const auto& line : text::read_lines(file)) {
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') {
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw InputError(file.string() + ": expected key = value");
    }
    kv[std::string(text::trim(t.substr(0, eq)))] = std::string(text::trim(t.substr(eq + 1)));
  }
  return kv;
}

template <typename Fn>
void for_each_csv_row(const fs::path& file, std::size_t fields, Fn fn) {
  const auto lines = text::read_lines(file);
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) {
      continue;
    }
    const auto f = text::split(lines[n], ",");
    if (f.size() != fields) {
      throw ParseError(file.string(), n + 1, "expected " + std::to_string(fields) + " fields");
    }
    try {
      fn(f);
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(file.string(), n + 1, e.what());
    }
  }
}

}  // namespace

DatasetBundle load_bundle(const fs::path& dir) {
  if (!fs::exists(dir / "bundle.txt")) {
    throw InputError("not a dataset bundle: " + dir.string());
  }
  const auto meta = read_key_values(dir / "bundle.txt");
  const Index m = text::parse_int(meta.at("users"));
  const Index n = text::parse_int(meta.at("items"));

  std::vector<Interaction> interactions;
  for_each_csv_row(dir / "interactions.csv", 4, [&](const auto& f) {
    Split s = Split::train;
    if (f[3] == "val") {
      s = Split::val;
    } else if (f[3] == "test") {
      s = Split::test;
    } else if (f[3] != "train") {
      throw InputError("bad split tag '" + std::string(f[3]) + "'");
    }
    interactions.push_back({static_cast<std::int32_t>(text::parse_int(f[0])),
                            static_cast<std::int32_t>(text::parse_int(f[1])), text::parse_int(f[2]), s});
  });

  UserAttributes ua;
  ua.has_gender = meta.at("has_gender") == "1";
  ua.has_age = meta.at("has_age") == "1";
  std::vector<std::int64_t> user_raw(static_cast<std::size_t>(m));
  ua.gender.resize(static_cast<std::size_t>(m));
  ua.age_group.resize(static_cast<std::size_t>(m));
  for_each_csv_row(dir / "users.csv", 4, [&](const auto& f) {
    const auto u = static_cast<std::size_t>(text::parse_int(f[0]));
    user_raw.at(u) = text::parse_int(f[1]);
    ua.gender[u] = parse_gender(f[2]);
    ua.age_group[u] = f[3].empty() ? std::nullopt : std::optional<int>(static_cast<int>(text::parse_int(f[3])));
  });
  if (!ua.has_gender) {
    ua.gender.clear();
  }
  if (!ua.has_age) {
    ua.age_group.clear();
  }

  ItemAttributes ia;
  ia.has_genres = meta.at("has_genres") == "1";
  std::vector<std::int64_t> item_raw(static_cast<std::size_t>(n));
  if (ia.has_genres) {
    ia.genres.resize(static_cast<std::size_t>(n));
  }
  for_each_csv_row(dir / "items.csv", 3, [&](const auto& f) {
    const auto i = static_cast<std::size_t>(text::parse_int(f[0]));
    item_raw.at(i) = text::parse_int(f[1]);
    if (ia.has_genres && !f[2].empty()) {
      for (const auto g : text::split(f[2], "|")) {
        ia.genres[i].push_back(static_cast<int>(text::parse_int(g)));
      }
    }
  });
  if (ia.has_genres) {
    const auto lines = text::read_lines(dir / "genres.csv");
    for (std::size_t k = 1; k < lines.size(); ++k) {
      if (lines[k].empty()) {
        continue;
      }
      const auto comma = lines[k].find(',');
      ia.genre_names.push_back(lines[k].substr(comma + 1));
    }
  }

  DatasetBundle bundle{InteractionDataset(m, n, std::move(interactions), std::move(user_raw), std::move(item_raw),
                                          std::move(ua), std::move(ia)),
                       {}};
  bundle.masks.popularity = text::read_matrix_csv(dir / "popularity_mask.csv");
  if (fs::exists(dir / "gender_mask.csv")) {
    bundle.masks.gender = text::read_matrix_csv(dir / "gender_mask.csv");
  }
  if (fs::exists(dir / "age_mask.csv")) {
    bundle.masks.age = text::read_matrix_csv(dir / "age_mask.csv");
  }
  if (fs::exists(dir / "genre_mask.csv")) {
    bundle.masks.genre = text::read_matrix_csv(dir / "genre_mask.csv");
  }
  return bundle;
}

}  // namespace moofair
