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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "moofair/numeric.hpp"

namespace moofair {

class ParseError : public InputError {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : InputError(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

enum class DatasetFormat { ml100k, ml1m, generic_tsv };

DatasetFormat parse_dataset_format(std::string_view name);

enum class Gender : std::uint8_t { female = 0, male = 1 };

inline constexpr int kNumGenders = 2;
inline constexpr int kNumAgeGroups = 7;
inline constexpr int kNumPopularityGroups = 5;
// Row of the popularity mask holding the most popular fifth of the catalog (label 5).
inline constexpr int kMostPopularGroup = kNumPopularityGroups - 1;

// Age brackets [0-17], [18-24], [25-34], [35-44], [45-49], [50-55], [56+] -> 0..6.
// Also maps the ML-1M age codes (1, 18, 25, 35, 45, 50, 56) onto the same groups.
std::optional<int> age_group(int age_years);

struct RatingRecord {
  std::int64_t user = 0;
  std::int64_t item = 0;
  double rating = 0.0;
  std::int64_t timestamp = 0;
};

struct UserInfo {
  std::optional<Gender> gender;
  std::optional<int> age;
};

struct RawDataset {
  std::vector<RatingRecord> records;
  std::optional<std::map<std::int64_t, UserInfo>> users;
  // Genre names in column order, and the genre indices of every item.
  std::vector<std::string> genre_names;
  std::optional<std::map<std::int64_t, std::vector<int>>> item_genres;

  std::size_t num_users() const;
  std::size_t num_items() const;
};

// Reads a dataset in one of the supported on-disk layouts. `path` is a
// directory (ml100k, ml1m, generic_tsv) or, for generic_tsv, a single
// ratings file. Attribute files that are missing leave the corresponding
// optional empty.
RawDataset ingest(const std::filesystem::path& path, DatasetFormat format);

enum class Split : std::uint8_t { train = 0, val = 1, test = 2 };

std::string_view split_name(Split split);

struct Interaction {
  std::int32_t user = 0;
  std::int32_t item = 0;
  std::int64_t timestamp = 0;
  Split split = Split::train;
};

struct UserAttributes {
  std::vector<std::optional<Gender>> gender;
  std::vector<std::optional<int>> age_group;
  bool has_gender = false;
  bool has_age = false;
};

struct ItemAttributes {
  std::vector<std::string> genre_names;
  std::vector<std::vector<int>> genres;
  bool has_genres = false;
};

// Filtered implicit-feedback interactions with dense ids and a per-user
// chronological train/val/test split. Immutable after construction.
class InteractionDataset {
 public:
  InteractionDataset() = default;
  InteractionDataset(Index num_users, Index num_items, std::vector<Interaction> interactions,
                     std::vector<std::int64_t> user_raw_ids, std::vector<std::int64_t> item_raw_ids,
                     UserAttributes users, ItemAttributes items);

  Index num_users() const { return num_users_; }
  Index num_items() const { return num_items_; }
  const std::vector<Interaction>& interactions() const { return interactions_; }
  const std::vector<std::int64_t>& user_raw_ids() const { return user_raw_ids_; }
  const std::vector<std::int64_t>& item_raw_ids() const { return item_raw_ids_; }
  const UserAttributes& users() const { return users_; }
  const ItemAttributes& items() const { return items_; }

  // Sorted item ids of `user` in the given split.
  const std::vector<std::int32_t>& items_of(Index user, Split split) const {
    return by_split_[static_cast<std::size_t>(split)][static_cast<std::size_t>(user)];
  }
  bool is_train_positive(Index user, Index item) const;
  // Train or validation positive; such items are never recommended at test time.
  bool is_seen(Index user, Index item) const;

  std::size_t count(Split split) const;

 private:
  Index num_users_ = 0;
  Index num_items_ = 0;
  std::vector<Interaction> interactions_;
  std::vector<std::int64_t> user_raw_ids_;
  std::vector<std::int64_t> item_raw_ids_;
  UserAttributes users_;
  ItemAttributes items_;
  std::vector<std::vector<std::int32_t>> by_split_[3];
};

inline constexpr double kPositiveRatingThreshold = 4.0;
inline constexpr std::size_t kMinItemRatings = 5;
inline constexpr std::size_t kMinUserRatings = 10;

enum class SplitOrder { chronological, random };

std::string_view split_order_name(SplitOrder order);
SplitOrder parse_split_order(std::string_view name);

struct PreprocessOptions {
  SplitOrder order = SplitOrder::chronological;
  // Seed of the per-user shuffle when order is random.
  std::uint64_t seed = 0;
};

// Keeps ratings >= 4, drops items with < 5 of them, then users with < 10
// (one pass, item filter first), remaps ids densely in raw-id order and
// splits each user's history 70/10/20, in time order or after a seeded
// per-user shuffle.
InteractionDataset preprocess(const RawDataset& raw, const PreprocessOptions& options = {});

// Binary membership matrices. Rows are groups, columns are users or items.
struct GroupMaskSet {
  std::optional<MatrixXd> gender;  // 2 x m: row 0 female, row 1 male
  std::optional<MatrixXd> age;     // 7 x m
  MatrixXd popularity;             // 5 x n: row r holds label r + 1, row 4 the most popular
  std::optional<MatrixXd> genre;   // g x n, an item may sit in several rows
};

// Popularity group (0 = least popular fifth .. 4 = most popular) of every
// item. Items are ordered by count descending then id ascending; leftover
// items from an uneven split go to the most popular groups first.
std::vector<int> popularity_groups(const std::vector<std::size_t>& counts);

GroupMaskSet build_masks(const InteractionDataset& dataset);

struct DatasetStats {
  std::size_t raw_records = 0;
  std::size_t raw_users = 0;
  std::size_t raw_items = 0;
  std::size_t users = 0;
  std::size_t items = 0;
  std::size_t interactions = 0;
  double density = 0.0;
};

DatasetStats compute_stats(const RawDataset& raw, const InteractionDataset& dataset);

struct DatasetBundle {
  InteractionDataset dataset;
  GroupMaskSet masks;
};

// CSV bundle: interactions.csv, users.csv, items.csv, genres.csv and one
// CSV matrix per mask. Byte-identical for identical inputs.
void save_bundle(const std::filesystem::path& dir, const InteractionDataset& dataset,
                 const GroupMaskSet& masks);
DatasetBundle load_bundle(const std::filesystem::path& dir);

void write_stats(const std::filesystem::path& file, const DatasetStats& stats);

}  // namespace moofair
