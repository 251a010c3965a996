/**
 * Tagged-corpus interchange records: one JSON object per line, shaped as
 *
 *   {"id": str, "text": str,
 *    "tokens": [{"surface": str, "pos": str}, ...],
 *    "noun_chunks": [[start, end], ...]}
 *
 * where noun_chunks holds half-open token-index spans, sorted by start and
 * pairwise non-overlapping, each ending on a nominal token.
 */

export const UPOS_TAGS = [
	'NOUN',
	'PROPN',
	'VERB',
	'ADJ',
	'ADV',
	'PRON',
	'NUM',
	'AUX',
	'ADP',
	'PART',
	'PUNCT',
	'SYM',
	'DET',
	'CCONJ',
	'SCONJ',
	'INTJ',
	'X',
] as const;

export type UposTag = (typeof UPOS_TAGS)[number];

// Tags allowed to close a chunk span (mirrors the consumer's loader).
export const NOMINAL_TAGS: ReadonlySet<UposTag> = new Set([
	'NOUN',
	'PROPN',
	'NUM',
	'PRON',
]);

export interface TaggedToken {
	surface: string;
	pos: UposTag;
}

export interface TaggedRecord {
	id: string;
	text: string;
	tokens: TaggedToken[];
	noun_chunks: Array<[number, number]>;
}

/**
 * Check the invariants the consuming loader enforces. Throws on the first
 * violation so a bad record never reaches an output file.
 */
export function validateRecord(rec: TaggedRecord): void {
	if (!rec.id) {
		throw new Error('record id must be non-empty');
	}
	for (const token of rec.tokens) {
		if (!token.surface) {
			throw new Error(`${rec.id}: token surface must be non-empty`);
		}
		if (!UPOS_TAGS.includes(token.pos)) {
			throw new Error(`${rec.id}: unknown POS tag ${JSON.stringify(token.pos)}`);
		}
	}
	const n = rec.tokens.length;
	let prevEnd = 0;
	for (const [start, end] of rec.noun_chunks) {
		if (!(0 <= start && start < end && end <= n)) {
			throw new Error(
				`${rec.id}: chunk span [${start}, ${end}) out of bounds for ${n} tokens`,
			);
		}
		if (start < prevEnd) {
			throw new Error(
				`${rec.id}: chunk span [${start}, ${end}) overlaps or is out of order`,
			);
		}
		const last = rec.tokens[end - 1]!;
		if (!NOMINAL_TAGS.has(last.pos)) {
			throw new Error(
				`${rec.id}: chunk span [${start}, ${end}) does not end on a nominal token`,
			);
		}
		prevEnd = end;
	}
}

/** Serialize one record, fields in schema order, no extras. */
export function recordToJson(rec: TaggedRecord): string {
	return JSON.stringify({
		id: rec.id,
		text: rec.text,
		tokens: rec.tokens.map((t) => ({ surface: t.surface, pos: t.pos })),
		noun_chunks: rec.noun_chunks.map(([a, b]) => [a, b]),
	});
}
