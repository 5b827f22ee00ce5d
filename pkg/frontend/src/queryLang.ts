/**
 * Client-side mirror of the attribute query language.
 *
 * Parsing keeps the builder controls in sync while the user edits raw
 * query text; rendering produces the same canonical form the server
 * uses.  The server stays authoritative: anything this parser rejects
 * simply leaves the builder disabled, the raw text is still submitted.
 */

export type CmpOp = "=" | "<" | "<=" | ">" | ">=";

export interface Comparison {
  op: CmpOp;
  value: number;
}

export type Tri =
  | { kind: "unspecified" }
  | { kind: "variable" }
  | { kind: "fixed"; value: string };

export type AgeState =
  | { kind: "unspecified" }
  | { kind: "variable" }
  | { kind: "comps"; comps: Comparison[] };

export interface CharacterConstraints {
  identity: string | null;
  gender: Tri;
  age: AgeState;
}

export interface Query {
  location: Tri;
  timeOfDay: Tri;
  movieYear: Comparison[];
  movieGenre: string | null;
  movieName: string | null;
  characterCount: number | null;
  characters: Map<number, CharacterConstraints>;
}

export class QueryError extends Error {
  constructor(message: string, public position: number) {
    super(message);
  }
}

export function emptyQuery(): Query {
  return {
    location: { kind: "unspecified" },
    timeOfDay: { kind: "unspecified" },
    movieYear: [],
    movieGenre: null,
    movieName: null,
    characterCount: null,
    characters: new Map(),
  };
}

interface Token {
  kind: "op" | "comma" | "int" | "word";
  text: string;
  pos: number;
}

const TOKEN = /(>=|<=|=|>|<)|(,)|(\d+)|([A-Za-z][A-Za-z0-9'_-]*)/y;
const SEPARATOR_WORDS = new Set(["where", "and"]);

function tokenize(source: string): Token[] {
  const tokens: Token[] = [];
  let i = 0;
  while (i < source.length) {
    if (/\s/.test(source[i])) {
      i += 1;
      continue;
    }
    TOKEN.lastIndex = i;
    const m = TOKEN.exec(source);
    if (!m) throw new QueryError(`unexpected character '${source[i]}'`, i);
    const kind = m[1] ? "op" : m[2] ? "comma" : m[3] ? "int" : "word";
    tokens.push({ kind, text: m[0], pos: i });
    i = TOKEN.lastIndex;
  }
  return tokens;
}

function resolveAttr(token: Token): { attr: string; slot: number | null } {
  const name = token.text.toLowerCase();
  const plain: Record<string, string> = {
    "place": "Place",
    "time-of-day": "Time-of-day",
    "movieyear": "MovieYear",
    "moviegenre": "MovieGenre",
    "moviename": "MovieName",
    "charactercount": "CharacterCount",
  };
  if (name in plain) return { attr: plain[name], slot: null };
  const m = /^character([0-9]+)(gender|age)?$/.exec(name);
  if (m && parseInt(m[1], 10) >= 1) {
    const slot = parseInt(m[1], 10);
    const suffix = m[2] === "gender" ? "Gender" : m[2] === "age" ? "Age" : "";
    return { attr: `Character${slot}${suffix}`, slot };
  }
  throw new QueryError(`unknown attribute '${token.text}'`, token.pos);
}

function satisfiable(comps: Comparison[], floor: number): boolean {
  let lo = floor;
  let hi = Infinity;
  for (const c of comps) {
    if (c.op === "=") {
      lo = Math.max(lo, c.value);
      hi = Math.min(hi, c.value);
    } else if (c.op === ">") lo = Math.max(lo, c.value + 1);
    else if (c.op === ">=") lo = Math.max(lo, c.value);
    else if (c.op === "<") hi = Math.min(hi, c.value - 1);
    else hi = Math.min(hi, c.value);
  }
  return lo <= hi;
}

function slotOf(query: Query, slot: number): CharacterConstraints {
  let cons = query.characters.get(slot);
  if (!cons) {
    cons = { identity: null, gender: { kind: "unspecified" }, age: { kind: "unspecified" } };
    query.characters.set(slot, cons);
  }
  return cons;
}

export function parseQuery(source: string): Query {
  const tokens = tokenize(source);
  const query = emptyQuery();
  if (tokens.length === 0) return query;

  const head = tokens[0];
  if (head.kind !== "word" || head.text.toLowerCase() !== "select") {
    throw new QueryError("query must start with 'select'", head.pos);
  }

  let idx = 1;
  const end = tokens.length;

  const conflict = (attr: string) => {
    throw new QueryError(`conflicting constraints on ${attr}`, 0);
  };

  const parseValue = (attr: string): { value: string; pos: number; variable: boolean } => {
    if (idx >= end) throw new QueryError(`expected a value for ${attr}`, tokens[idx - 1].pos);
    const tok = tokens[idx];
    if (tok.kind !== "word" && tok.kind !== "int") {
      throw new QueryError(`expected a value for ${attr}`, tok.pos);
    }
    if (tok.kind === "word" && tok.text.toLowerCase() === "variable") {
      idx += 1;
      return { value: "Variable", pos: tok.pos, variable: true };
    }
    const words: string[] = [];
    const start = tok.pos;
    while (
      idx < end &&
      (tokens[idx].kind === "word" || tokens[idx].kind === "int") &&
      !SEPARATOR_WORDS.has(tokens[idx].text.toLowerCase())
    ) {
      words.push(tokens[idx].text);
      idx += 1;
    }
    return { value: words.join(" "), pos: start, variable: false };
  };

  for (;;) {
    if (idx >= end) throw new QueryError("expected an attribute name", tokens[idx - 1].pos);
    const attrTok = tokens[idx];
    if (attrTok.kind !== "word") throw new QueryError("expected an attribute name", attrTok.pos);
    const { attr, slot } = resolveAttr(attrTok);
    idx += 1;
    if (idx >= end || tokens[idx].kind !== "op") {
      throw new QueryError(`expected a comparison operator after ${attr}`,
        idx < end ? tokens[idx].pos : attrTok.pos);
    }
    const opTok = tokens[idx];
    const op = opTok.text as CmpOp;
    idx += 1;
    const { value, pos, variable } = parseValue(attr);

    const numeric = !variable && (attr === "MovieYear" || attr === "CharacterCount" || attr.endsWith("Age"));
    if (numeric && !/^\d+$/.test(value)) {
      throw new QueryError(`${attr} takes an integer value`, pos);
    }
    if (op !== "=" && !(attr === "MovieYear" || attr.endsWith("Age"))) {
      throw new QueryError(`${attr} only supports '='`, opTok.pos);
    }
    if (variable && op !== "=") throw new QueryError("'Variable' requires '='", opTok.pos);

    if (attr === "Place") {
      if (query.location.kind !== "unspecified") conflict(attr);
      query.location = variable ? { kind: "variable" } : { kind: "fixed", value };
    } else if (attr === "Time-of-day") {
      if (query.timeOfDay.kind !== "unspecified") conflict(attr);
      if (variable) query.timeOfDay = { kind: "variable" };
      else {
        const norm = value.toLowerCase();
        if (norm !== "day" && norm !== "night") {
          throw new QueryError("Time-of-day takes 'day', 'night', or 'Variable'", pos);
        }
        query.timeOfDay = { kind: "fixed", value: norm };
      }
    } else if (attr === "MovieYear") {
      if (variable) throw new QueryError("MovieYear cannot be Variable", pos);
      query.movieYear.push({ op, value: parseInt(value, 10) });
    } else if (attr === "MovieGenre") {
      if (variable) throw new QueryError("MovieGenre cannot be Variable", pos);
      if (query.movieGenre !== null) conflict(attr);
      query.movieGenre = value;
    } else if (attr === "MovieName") {
      if (variable) throw new QueryError("MovieName cannot be Variable", pos);
      if (query.movieName !== null) conflict(attr);
      query.movieName = value;
    } else if (attr === "CharacterCount") {
      if (variable) throw new QueryError("CharacterCount cannot be Variable", pos);
      if (query.characterCount !== null) conflict(attr);
      const count = parseInt(value, 10);
      if (count < 1) throw new QueryError("CharacterCount must be a positive integer", pos);
      query.characterCount = count;
    } else if (attr.endsWith("Gender")) {
      const cons = slotOf(query, slot as number);
      if (cons.gender.kind !== "unspecified") conflict(attr);
      if (variable) cons.gender = { kind: "variable" };
      else {
        const norm = value.toLowerCase();
        if (norm !== "male" && norm !== "female") {
          throw new QueryError(`${attr} takes 'male', 'female', or 'Variable'`, pos);
        }
        cons.gender = { kind: "fixed", value: norm };
      }
    } else if (attr.endsWith("Age")) {
      const cons = slotOf(query, slot as number);
      if (variable) {
        if (cons.age.kind !== "unspecified") conflict(attr);
        cons.age = { kind: "variable" };
      } else {
        if (cons.age.kind === "variable") conflict(attr);
        const comps = cons.age.kind === "comps" ? cons.age.comps : [];
        const comp = { op, value: parseInt(value, 10) };
        if (!comps.some((c) => c.op === comp.op && c.value === comp.value)) {
          comps.push(comp);
        }
        cons.age = { kind: "comps", comps };
      }
    } else {
      const cons = slotOf(query, slot as number);
      if (variable) throw new QueryError(`${attr} names a cast member and cannot be Variable`, pos);
      if (cons.identity !== null) conflict(attr);
      cons.identity = value;
    }

    if (idx >= end) break;
    const sep = tokens[idx];
    if (sep.kind === "comma" || (sep.kind === "word" && SEPARATOR_WORDS.has(sep.text.toLowerCase()))) {
      idx += 1;
      continue;
    }
    throw new QueryError("expected ',', 'where', or 'and'", sep.pos);
  }

  if (query.movieYear.length && !satisfiable(query.movieYear, -Infinity)) {
    throw new QueryError("conflicting constraints on MovieYear", 0);
  }
  for (const [slot, cons] of query.characters) {
    if (cons.age.kind === "comps" && !satisfiable(cons.age.comps, 1)) {
      throw new QueryError(`conflicting constraints on Character${slot}Age`, 0);
    }
  }
  return query;
}

const OP_ORDER: Record<CmpOp, number> = { "=": 0, "<": 1, "<=": 2, ">": 3, ">=": 4 };

function sortedComps(comps: Comparison[]): Comparison[] {
  return [...comps].sort((a, b) => OP_ORDER[a.op] - OP_ORDER[b.op] || a.value - b.value);
}

const capitalize = (s: string) => s.charAt(0).toUpperCase() + s.slice(1);

/** Canonical text; parseQuery inverts it. */
export function renderQuery(query: Query): string {
  const parts: string[] = [];
  if (query.location.kind === "variable") parts.push("Place=Variable");
  else if (query.location.kind === "fixed") parts.push(`Place=${query.location.value}`);
  if (query.timeOfDay.kind === "variable") parts.push("Time-of-day=Variable");
  else if (query.timeOfDay.kind === "fixed") {
    parts.push(`Time-of-day=${capitalize(query.timeOfDay.value)}`);
  }
  for (const comp of sortedComps(query.movieYear)) {
    parts.push(`MovieYear${comp.op}${comp.value}`);
  }
  if (query.movieGenre !== null) parts.push(`MovieGenre=${query.movieGenre}`);
  if (query.movieName !== null) parts.push(`MovieName=${query.movieName}`);
  if (query.characterCount !== null) parts.push(`CharacterCount=${query.characterCount}`);
  for (const slot of [...query.characters.keys()].sort((a, b) => a - b)) {
    const cons = query.characters.get(slot)!;
    if (cons.identity !== null) parts.push(`Character${slot}=${cons.identity}`);
    if (cons.gender.kind === "variable") parts.push(`Character${slot}Gender=Variable`);
    else if (cons.gender.kind === "fixed") {
      parts.push(`Character${slot}Gender=${capitalize(cons.gender.value)}`);
    }
    if (cons.age.kind === "variable") parts.push(`Character${slot}Age=Variable`);
    else if (cons.age.kind === "comps") {
      for (const comp of sortedComps(cons.age.comps)) {
        parts.push(`Character${slot}Age${comp.op}${comp.value}`);
      }
    }
  }
  return parts.length ? `select ${parts.join(", ")}` : "";
}
