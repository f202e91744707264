/** Tiny SQL syntax highlighter: escapes HTML, wraps tokens in spans. */

const KEYWORDS = new Set([
  "SELECT", "FROM", "WHERE", "GROUP", "BY", "ORDER", "JOIN", "LEFT",
  "OUTER", "ON", "AS", "AND", "OR", "NOT", "DISTINCT", "ASC", "DESC",
  "NULLS", "FIRST", "LAST", "OVER", "PARTITION", "IS", "NULL", "SEPARATOR",
]);

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

const TOKEN =
  /('(?:[^']|'')*')|("(?:[^"]|"")*")|(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z0-9_]*)/g;

/** HTML for a SQL string with token-level highlighting spans. */
export function highlightSql(sql: string): string {
  let out = "";
  let last = 0;
  for (const m of sql.matchAll(TOKEN)) {
    out += escapeHtml(sql.slice(last, m.index));
    last = m.index + m[0].length;
    const [whole, str, ident, num, word] = m;
    if (str !== undefined) {
      out += `<span class="sql-str">${escapeHtml(whole)}</span>`;
    } else if (ident !== undefined) {
      out += `<span class="sql-ident">${escapeHtml(whole)}</span>`;
    } else if (num !== undefined) {
      out += `<span class="sql-num">${escapeHtml(whole)}</span>`;
    } else if (word !== undefined && KEYWORDS.has(word)) {
      // case-sensitive on purpose: the generator upper-cases keywords,
      // so a column that happens to be named "first" stays an identifier
      out += `<span class="sql-kw">${escapeHtml(whole)}</span>`;
    } else if (word !== undefined && sql[last] === "(") {
      out += `<span class="sql-fn">${escapeHtml(whole)}</span>`;
    } else {
      out += escapeHtml(whole);
    }
  }
  return out + escapeHtml(sql.slice(last));
}
