/*
 * Copyright 2026 The trackr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "trackr/evaluator.hpp"

#include <algorithm>
#include <cmath>

#include "trackr/builtins.hpp"
#include "trackr/csv.hpp"
#include "trackr/error.hpp"
#include "trackr/stats.hpp"

namespace trackr {

void Minstd::seed_with(std::uint64_t seed) {
  state_ = seed % kModulus;
  if (state_ == 0) state_ = 1;
}

std::uint64_t Minstd::next() {
  state_ = (state_ * kMultiplier) % kModulus;
  return state_;
}

std::vector<std::size_t> sample_indices(Minstd& rng, std::size_t population, std::size_t n) {
  std::vector<std::size_t> idx(population);
  for (std::size_t i = 0; i < population; ++i) idx[i] = i;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.next() % (population - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  return idx;
}

const ArtifactValue* Env::lookup(const std::string& name) const {
  auto it = bindings.find(name);
  return it == bindings.end() ? nullptr : &it->second;
}

std::size_t EvalResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(outcomes.begin(), outcomes.end(), [](const auto& o) { return !o.ok; }));
}

const std::vector<std::pair<std::string, std::string>>& geom_default_stats() {
  static const std::vector<std::pair<std::string, std::string>> kStats = {
      {"point", "identity"}, {"smooth", "smooth"},   {"line", "identity"},
      {"bar", "count"},      {"boxplot", "boxplot"}, {"histogram", "bin"},
  };
  return kStats;
}

namespace {

[[noreturn]] void type_error(const std::string& msg) { throw EvalError(EvalErrorKind::TypeError, msg); }

struct Args {
  std::vector<ArtifactValue> positional;
  std::vector<std::pair<std::string, ArtifactValue>> named;
};

struct Param {
  const char* name;
  bool required;
};

/// Matches positional arguments to parameters in order, then named ones
/// by name.
class Bound {
 public:
  Bound(const std::string& fn, Args args, std::initializer_list<Param> params) : fn_(fn) {
    std::vector<Param> ps(params);
    if (args.positional.size() > ps.size()) {
      throw EvalError(EvalErrorKind::ArityError, fn + "() takes at most " +
                                                     std::to_string(ps.size()) + " arguments");
    }
    for (std::size_t i = 0; i < args.positional.size(); ++i) {
      values_.emplace(ps[i].name, std::move(args.positional[i]));
    }
    for (auto& [name, value] : args.named) {
      bool known = std::any_of(ps.begin(), ps.end(), [&](const Param& p) { return name == p.name; });
      if (!known) throw EvalError(EvalErrorKind::ArityError, fn + "() has no argument '" + name + "'");
      if (!values_.emplace(name, std::move(value)).second) {
        throw EvalError(EvalErrorKind::ArityError, fn + "() got argument '" + name + "' twice");
      }
    }
    for (const auto& p : ps) {
      if (p.required && !values_.count(p.name)) {
        throw EvalError(EvalErrorKind::ArityError,
                        fn + "() missing required argument '" + std::string(p.name) + "'");
      }
    }
  }

  bool has(const char* name) const { return values_.count(name) > 0; }
  const ArtifactValue& get(const char* name) const { return values_.at(name); }

  std::string where(const char* name) const { return fn_ + "(" + name + ")"; }

  TablePtr table(const char* name) const {
    auto* t = get(name).as<TablePtr>();
    if (!t) type_error(where(name) + " must be a table");
    return *t;
  }

  double number(const char* name) const {
    auto* s = get(name).as<Scalar>();
    auto* d = s ? std::get_if<double>(&s->value) : nullptr;
    if (!d) type_error(where(name) + " must be a number");
    return *d;
  }

  std::size_t count(const char* name) const {
    double v = number(name);
    if (!(v >= 0) || v != std::floor(v) || v > 1e15) {
      type_error(where(name) + " must be a non-negative integer");
    }
    return static_cast<std::size_t>(v);
  }

  std::string string(const char* name) const {
    auto* s = get(name).as<Scalar>();
    auto* str = s ? std::get_if<std::string>(&s->value) : nullptr;
    if (!str) type_error(where(name) + " must be a string");
    return *str;
  }

  std::optional<std::string> opt_string(const char* name) const {
    if (!has(name)) return std::nullopt;
    return string(name);
  }

  std::vector<std::string> strings(const char* name) const {
    const auto& v = get(name);
    if (auto* s = v.as<Scalar>(); s && std::holds_alternative<std::string>(s->value)) {
      return {std::get<std::string>(s->value)};
    }
    if (auto* vec = v.as<Vector>()) {
      if (auto* xs = std::get_if<std::vector<std::string>>(&vec->items)) return *xs;
      if (vec->size() == 0) return {};
    }
    type_error(where(name) + " must be a string or list of strings");
  }

 private:
  std::string fn_;
  std::map<std::string, ArtifactValue> values_;
};

const Column& require_column(const Table& t, const std::string& name, const std::string& where) {
  const Column* c = t.find(name);
  if (!c) type_error(where + ": no column named '" + name + "'");
  return *c;
}

ArtifactValue b_read_csv(Args args, Env& env) {
  Bound b("read_csv", std::move(args), {{"path", true}});
  std::filesystem::path path = b.string("path");
  if (path.is_relative() && !env.base_dir.empty()) path = env.base_dir / path;
  return read_csv_file(path);
}

ArtifactValue b_set_seed(Args args, Env& env) {
  Bound b("set_seed", std::move(args), {{"seed", true}});
  Minstd rng;
  rng.seed_with(b.count("seed"));
  env.rng_state = rng.state();
  return Unit{};
}

ArtifactValue b_sample_rows(Args args, Env& env) {
  Bound b("sample_rows", std::move(args), {{"data", true}, {"n", true}});
  TablePtr t = b.table("data");
  std::size_t n = b.count("n");
  if (n > t->nrow) {
    type_error("sample_rows(): cannot take a sample of " + std::to_string(n) + " from " +
               std::to_string(t->nrow) + " rows");
  }
  Minstd rng;
  rng.set_state(env.rng_state);
  auto rows = sample_indices(rng, t->nrow, n);
  env.rng_state = rng.state();
  return t->take_rows(rows);
}

ArtifactValue b_plot_spec(Args args, Env&) {
  Bound b("plot_spec", std::move(args),
          {{"data", true}, {"x", true}, {"y", false}, {"color", false}, {"facet", false},
           {"geoms", true}, {"title", false}, {"xlab", false}, {"ylab", false}});
  PlotSpec p;
  p.data = b.table("data");
  for (const char* aes : {"x", "y", "color"}) {
    if (!b.has(aes)) continue;
    std::string col = b.string(aes);
    require_column(*p.data, col, b.where(aes));
    p.mappings[aes] = col;
  }
  if (b.has("facet")) {
    for (const auto& col : b.strings("facet")) {
      require_column(*p.data, col, b.where("facet"));
      p.facets.push_back(col);
    }
  }
  const auto& known = geom_default_stats();
  for (const auto& g : b.strings("geoms")) {
    auto it = std::find_if(known.begin(), known.end(), [&](const auto& kv) { return kv.first == g; });
    if (it == known.end()) type_error("plot_spec(): unknown geom '" + g + "'");
    p.geoms.push_back(g);
    p.stats.push_back(it->second);
  }
  if (p.geoms.empty()) type_error("plot_spec(): at least one geom is required");
  p.title = b.opt_string("title");
  if (auto l = b.opt_string("xlab")) p.labels["x"] = *l;
  if (auto l = b.opt_string("ylab")) p.labels["y"] = *l;
  return p;
}

ArtifactValue b_fit_lm(Args args, Env&) {
  Bound b("fit_lm", std::move(args), {{"formula", true}, {"data", true}});
  std::string text = b.string("formula");
  TablePtr t = b.table("data");
  stats::Formula f = stats::parse_formula(text);
  auto numeric_column = [&](const std::string& name) -> const NumericColumn& {
    const Column* c = t->find(name);
    if (!c) throw EvalError(EvalErrorKind::FormulaError, "fit_lm(): unknown column '" + name + "'");
    if (!c->numeric()) {
      throw EvalError(EvalErrorKind::FormulaError, "fit_lm(): column '" + name + "' is not numeric");
    }
    return c->numbers();
  };
  const NumericColumn& y = numeric_column(f.response);
  std::vector<const NumericColumn*> xs;
  for (const auto& term : f.terms) xs.push_back(&numeric_column(term));
  const std::size_t p = xs.size() + 1;
  std::vector<double> design;
  design.reserve(t->nrow * p);
  for (std::size_t r = 0; r < t->nrow; ++r) {
    design.push_back(1.0);
    for (const auto* x : xs) design.push_back((*x)[r]);
  }
  stats::OlsFit fit = stats::ols(design, p, y);
  ModelFit m;
  m.formula = text;
  m.response = f.response;
  m.coef_names.push_back("(Intercept)");
  m.coef_names.insert(m.coef_names.end(), f.terms.begin(), f.terms.end());
  m.coefficients = std::move(fit.coefficients);
  m.std_errors = std::move(fit.std_errors);
  m.t_stats = std::move(fit.t_stats);
  m.p_values = std::move(fit.p_values);
  m.nobs = fit.nobs;
  m.df_residual = fit.df_residual;
  m.rss = fit.rss;
  m.data = t;
  return m;
}

ArtifactValue b_nrow(Args args, Env&) {
  Bound b("nrow", std::move(args), {{"data", true}});
  return Scalar{static_cast<double>(b.table("data")->nrow)};
}

Table stat_table(const std::vector<std::pair<std::string, const NumericColumn*>>& cols) {
  Table out;
  out.nrow = 4;
  out.columns.push_back({"stat", StringColumn{"min", "median", "mean", "max"}});
  for (const auto& [name, xs] : cols) {
    double lo = xs->empty() ? NAN : *std::min_element(xs->begin(), xs->end());
    double hi = xs->empty() ? NAN : *std::max_element(xs->begin(), xs->end());
    out.columns.push_back({name, NumericColumn{lo, stats::median(*xs), stats::mean(*xs), hi}});
  }
  return out;
}

ArtifactValue b_summary(Args args, Env&) {
  Bound b("summary", std::move(args), {{"object", true}});
  const ArtifactValue& v = b.get("object");
  if (const Table* t = v.table()) {
    std::vector<std::pair<std::string, const NumericColumn*>> cols;
    for (const auto& c : t->columns) {
      if (c.numeric()) cols.emplace_back(c.name, &c.numbers());
    }
    return stat_table(cols);
  }
  if (auto* vec = v.as<Vector>()) {
    if (auto* xs = std::get_if<std::vector<double>>(&vec->items)) return stat_table({{"value", xs}});
  }
  if (auto* m = v.as<ModelFit>()) {
    Table out;
    out.nrow = m->coef_names.size();
    out.columns.push_back({"term", m->coef_names});
    out.columns.push_back({"estimate", m->coefficients});
    out.columns.push_back({"std_error", m->std_errors});
    out.columns.push_back({"t_value", m->t_stats});
    out.columns.push_back({"p_value", m->p_values});
    return out;
  }
  type_error("summary(): unsupported argument of kind " + std::string(to_string(v.kind())));
}

ArtifactValue b_mean(Args args, Env&) {
  Bound b("mean", std::move(args), {{"x", true}});
  const ArtifactValue& v = b.get("x");
  if (auto* vec = v.as<Vector>()) {
    if (auto* xs = std::get_if<std::vector<double>>(&vec->items)) return Scalar{stats::mean(*xs)};
  }
  if (auto* s = v.as<Scalar>(); s && std::holds_alternative<double>(s->value)) return *s;
  type_error("mean(): argument must be numeric");
}

ArtifactValue b_head(Args args, Env&) {
  Bound b("head", std::move(args), {{"data", true}, {"n", false}});
  TablePtr t = b.table("data");
  std::size_t n = b.has("n") ? b.count("n") : 6;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < std::min(n, t->nrow); ++i) rows.push_back(i);
  return t->take_rows(rows);
}

ArtifactValue b_data_frame(Args args, Env&) {
  if (!args.positional.empty()) {
    throw EvalError(EvalErrorKind::ArityError, "data_frame() takes named columns only");
  }
  Table t;
  bool first = true;
  for (auto& [name, value] : args.named) {
    Column c{name, {}};
    if (auto* vec = value.as<Vector>()) {
      if (auto* d = std::get_if<std::vector<double>>(&vec->items)) {
        c.data = *d;
      } else if (auto* s = std::get_if<std::vector<std::string>>(&vec->items)) {
        c.data = *s;
      } else {
        type_error("data_frame(): column '" + name + "' must hold numbers or strings");
      }
    } else if (auto* s = value.as<Scalar>()) {
      if (auto* d = std::get_if<double>(&s->value)) {
        c.data = NumericColumn{*d};
      } else if (auto* str = std::get_if<std::string>(&s->value)) {
        c.data = StringColumn{*str};
      } else {
        type_error("data_frame(): column '" + name + "' must hold numbers or strings");
      }
    } else {
      type_error("data_frame(): column '" + name + "' must be a list");
    }
    if (first) {
      t.nrow = c.size();
      first = false;
    } else if (c.size() != t.nrow) {
      type_error("data_frame(): columns differ in length");
    }
    t.columns.push_back(std::move(c));
  }
  return t;
}

using BuiltinFn = ArtifactValue (*)(Args, Env&);

struct Builtin {
  BuiltinInfo info;
  BuiltinFn fn;
};

const std::vector<Builtin>& builtins() {
  static const std::vector<Builtin> kBuiltins = {
      {{"read_csv", kBasePackage}, b_read_csv},
      {{"set_seed", kBasePackage, false, true}, b_set_seed},
      {{"sample_rows", kBasePackage, true, true}, b_sample_rows},
      {{"plot_spec", "vizlib"}, b_plot_spec},
      {{"fit_lm", kBasePackage}, b_fit_lm},
      {{"nrow", kBasePackage}, b_nrow},
      {{"summary", kBasePackage}, b_summary},
      {{"mean", kBasePackage}, b_mean},
      {{"head", kBasePackage}, b_head},
      {{"data_frame", kBasePackage}, b_data_frame},
  };
  return kBuiltins;
}

const Builtin* find_builtin(std::string_view name) {
  for (const auto& b : builtins()) {
    if (b.info.name == name) return &b;
  }
  return nullptr;
}

double arith(char op, double a, double b) {
  switch (op) {
    case '+': return a + b;
    case '-': return a - b;
    case '*': return a * b;
    default: return a / b;
  }
}

const double* as_number(const ArtifactValue& v) {
  auto* s = v.as<Scalar>();
  return s ? std::get_if<double>(&s->value) : nullptr;
}

const std::vector<double>* as_numbers(const ArtifactValue& v) {
  auto* vec = v.as<Vector>();
  return vec ? std::get_if<std::vector<double>>(&vec->items) : nullptr;
}

ArtifactValue binop(char op, const ArtifactValue& a, const ArtifactValue& b) {
  const double* x = as_number(a);
  const double* y = as_number(b);
  const auto* xs = as_numbers(a);
  const auto* ys = as_numbers(b);
  if (x && y) return Scalar{arith(op, *x, *y)};
  std::vector<double> out;
  if (xs && y) {
    for (double v : *xs) out.push_back(arith(op, v, *y));
  } else if (x && ys) {
    for (double v : *ys) out.push_back(arith(op, *x, v));
  } else if (xs && ys) {
    if (xs->size() != ys->size()) type_error("vector lengths differ in arithmetic");
    for (std::size_t i = 0; i < xs->size(); ++i) out.push_back(arith(op, (*xs)[i], (*ys)[i]));
  } else {
    type_error(std::string("operator ") + op + " needs numeric operands, got " +
               to_string(a.kind()) + " and " + to_string(b.kind()));
  }
  return Vector{std::move(out)};
}

ArtifactValue column_vector(const Column& c) {
  if (c.numeric()) return Vector{c.numbers()};
  return Vector{c.strings()};
}

ArtifactValue index(const ArtifactValue& base, const std::variant<std::string, std::int64_t>& key) {
  const std::string* field = std::get_if<std::string>(&key);
  if (const Table* t = base.table()) {
    if (field) return column_vector(require_column(*t, *field, "index"));
    auto pos = static_cast<std::size_t>(std::get<std::int64_t>(key));
    if (pos == 0 || pos > t->columns.size()) type_error("column position out of range");
    return column_vector(t->columns[pos - 1]);
  }
  if (auto* v = base.as<Vector>()) {
    if (field) type_error("vectors are indexed by position");
    auto pos = static_cast<std::size_t>(std::get<std::int64_t>(key));
    if (pos == 0 || pos > v->size()) type_error("vector position out of range");
    return std::visit([&](const auto& xs) -> ArtifactValue { return Scalar{xs[pos - 1]}; },
                      v->items);
  }
  if (auto* p = base.as<PlotSpec>(); p && field && *field == "data") return p->data;
  if (auto* m = base.as<ModelFit>(); m && field) {
    if (*field == "coefficients") return Vector{m->coefficients};
    if (*field == "std_errors") return Vector{m->std_errors};
    if (*field == "t_stats") return Vector{m->t_stats};
    if (*field == "p_values") return Vector{m->p_values};
    if (*field == "data") return m->data;
  }
  type_error(std::string("cannot index a ") + to_string(base.kind()));
}

ArtifactValue list_value(std::vector<ArtifactValue> items) {
  if (items.empty()) return Vector{std::vector<double>{}};
  auto scalar = [&](std::size_t i) -> const Scalar& {
    auto* s = items[i].as<Scalar>();
    if (!s) type_error("list elements must be scalars");
    return *s;
  };
  const std::size_t alt = scalar(0).value.index();
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (scalar(i).value.index() != alt) type_error("list elements must share one type");
  }
  return std::visit(
      [&](const auto& first) -> ArtifactValue {
        using T = std::decay_t<decltype(first)>;
        std::vector<T> out;
        for (const auto& item : items) out.push_back(std::get<T>(item.as<Scalar>()->value));
        return Vector{std::move(out)};
      },
      scalar(0).value);
}

ArtifactValue eval_call(const ast::Call& c, Env& env) {
  const Builtin* b = find_builtin(c.fn);
  if (!b) throw EvalError(EvalErrorKind::UnknownFunction, "no function named '" + c.fn + "'");
  if (b->info.package != kBasePackage && !env.loaded_packages.count(std::string(b->info.package))) {
    throw EvalError(EvalErrorKind::UnknownFunction,
                    c.fn + "() requires library(" + std::string(b->info.package) + ")");
  }
  Args args;
  for (const auto& a : c.args) args.positional.push_back(eval_expr(a, env));
  for (const auto& a : c.named) args.named.emplace_back(a.name, eval_expr(*a.value, env));
  return b->fn(std::move(args), env);
}

}  // namespace

std::optional<BuiltinInfo> builtin_info(std::string_view name) {
  if (const Builtin* b = find_builtin(name)) return b->info;
  return std::nullopt;
}

ArtifactValue eval_expr(const Expr& e, Env& env) {
  try {
    return std::visit(
        [&](const auto& n) -> ArtifactValue {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, ast::Var>) {
            const ArtifactValue* v = env.lookup(n.name);
            if (!v) throw EvalError(EvalErrorKind::UnknownVariable, "object '" + n.name + "' not found");
            return *v;
          } else if constexpr (std::is_same_v<T, ast::Str>) {
            return Scalar{n.text};
          } else if constexpr (std::is_same_v<T, ast::Num>) {
            return Scalar{n.value};
          } else if constexpr (std::is_same_v<T, ast::Bool>) {
            return Scalar{n.value};
          } else if constexpr (std::is_same_v<T, ast::List>) {
            std::vector<ArtifactValue> items;
            for (const auto& item : n.items) items.push_back(eval_expr(item, env));
            return list_value(std::move(items));
          } else if constexpr (std::is_same_v<T, ast::Call>) {
            return eval_call(n, env);
          } else if constexpr (std::is_same_v<T, ast::BinOp>) {
            ArtifactValue lhs = eval_expr(*n.lhs, env);
            ArtifactValue rhs = eval_expr(*n.rhs, env);
            return binop(n.op, lhs, rhs);
          } else {
            return index(eval_expr(*n.base, env), n.key);
          }
        },
        e.node);
  } catch (EvalError& err) {
    err.locate(e.span);
    throw;
  }
}

ArtifactValue eval_top(const TopExpr& e, Env& env) {
  const std::uint64_t rng = env.rng_state;
  const auto loaded = env.loaded_packages;
  try {
    if (auto* a = e.as<ast::Assign>()) {
      ArtifactValue v = eval_expr(a->value, env);
      env.bindings[a->target] = v;
      return v;
    }
    if (auto* s = e.as<ast::ExprStmt>()) return eval_expr(s->value, env);
    env.loaded_packages.insert(e.as<ast::Load>()->package);
    return Unit{};
  } catch (EvalError& err) {
    env.rng_state = rng;
    env.loaded_packages = loaded;
    err.locate(e.span);
    throw;
  }
}

EvalResult eval_program(const Program& p, Env& env) {
  EvalResult r;
  r.outcomes.reserve(p.size());
  for (const auto& e : p.exprs) {
    ExprOutcome o;
    try {
      o.value = eval_top(e, env);
      o.ok = true;
    } catch (const EvalError& err) {
      o.error = err;
    }
    r.outcomes.push_back(std::move(o));
  }
  return r;
}

}  // namespace trackr
