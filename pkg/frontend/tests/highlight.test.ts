import { describe, expect, it } from "vitest";

import { escapeHtml, highlightSql } from "../src/highlight.js";

describe("escapeHtml", () => {
  it("neutralises markup characters", () => {
    expect(escapeHtml(`<a b="c">&`)).toBe("&lt;a b=&quot;c&quot;&gt;&amp;");
  });
});

describe("highlightSql", () => {
  it("wraps keywords, functions, numbers, and strings", () => {
    const html = highlightSql("SELECT max(price) FROM t WHERE name = 'x' AND n = 2");
    expect(html).toContain('<span class="sql-kw">SELECT</span>');
    expect(html).toContain('<span class="sql-kw">WHERE</span>');
    expect(html).toContain('<span class="sql-fn">max</span>');
    expect(html).toContain('<span class="sql-num">2</span>');
    expect(html).toContain("<span class=\"sql-str\">'x'</span>");
  });

  it("is case-sensitive so lower-case identifiers stay identifiers", () => {
    const html = highlightSql("SELECT first FROM t");
    expect(html).toContain('<span class="sql-kw">SELECT</span>');
    expect(html).not.toContain('<span class="sql-kw">first</span>');
    expect(html).toContain("first");
  });

  it("marks double-quoted identifiers", () => {
    const html = highlightSql('SELECT "naïve col" FROM t');
    expect(html).toContain('<span class="sql-ident">&quot;naïve col&quot;</span>');
  });

  it("never lets SQL text inject markup", () => {
    const html = highlightSql("SELECT '<script>alert(1)</script>' FROM t");
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });

  it("keeps doubled quotes inside string literals as one token", () => {
    const html = highlightSql("SELECT 'it''s' FROM t");
    expect(html).toContain("<span class=\"sql-str\">'it''s'</span>");
  });
});
