#pragma once
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace piii::exactalg {

// Which parameter layer a symbol belongs to. theta-level and alpha-level
// symbols never meet inside one substitution.
enum class Level { neutral, theta, alpha };

// Interned indeterminate. The index doubles as the term-order priority:
// lower index = more significant variable in the lex tie-break.
class Symbol {
 public:
  Symbol() = default;
  static Symbol intern(std::string_view name);
  // Returns false if the name is not yet registered.
  static bool lookup(std::string_view name, Symbol* out);

  std::uint8_t index() const { return id_; }
  const std::string& name() const;
  Level level() const;

  friend bool operator==(Symbol a, Symbol b) { return a.id_ == b.id_; }
  friend bool operator!=(Symbol a, Symbol b) { return a.id_ != b.id_; }
  friend bool operator<(Symbol a, Symbol b) { return a.id_ < b.id_; }

  static Symbol from_index(std::uint8_t i) {
    Symbol s;
    s.id_ = i;
    return s;
  }

 private:
  std::uint8_t id_ = 0;
};

std::size_t registry_size();

// Registry names of the fixed symbols.
namespace sym {
Symbol z();
Symbol t();
Symbol q();
Symbol a();
Symbol theta();
Symbol theta0();
Symbol thetainf();
Symbol d();
Symbol eps1();
Symbol eps2();
Symbol alpha();
Symbol beta();
}  // namespace sym

}  // namespace piii::exactalg
