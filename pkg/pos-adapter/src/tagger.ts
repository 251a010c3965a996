import * as path from 'path';

import * as kuromoji from 'kuromoji';
import type { IpadicFeatures } from 'kuromoji';

import { nounChunkSpans } from './chunker';
import { validateRecord, type TaggedRecord, type UposTag } from './interchange';
import { toUniversalPos } from './upos';

/** The slice of the morphological analyzer the tagger depends on. */
export interface Analyzer {
	tokenize(text: string): IpadicFeatures[];
}

export interface CorpusResult {
	records: TaggedRecord[];
	/** Lines the analyzer rejected (no analysis, or it threw). */
	skipped: number;
}

/**
 * Load the bundled-dictionary analyzer. Rejects when the dictionary is
 * unavailable; callers turn that into a diagnostic exit.
 */
export function loadAnalyzer(dicPath?: string): Promise<Analyzer> {
	return new Promise((resolve, reject) => {
		const builder = kuromoji.builder({ dicPath: dicPath ?? defaultDictDir() });
		builder.build((err, tokenizer) => {
			if (err) {
				reject(new Error(`analyzer unavailable: ${err.message}`));
			} else {
				resolve(tokenizer);
			}
		});
	});
}

export function defaultDictDir(): string {
	// compiled code sits in dist/ next to this package's node_modules; the
	// test runner transforms away __dirname, so fall back to the package cwd
	const base =
		typeof __dirname !== 'undefined' ? path.join(__dirname, '..') : process.cwd();
	return path.join(base, 'node_modules', 'kuromoji', 'dict');
}

/**
 * Tag one sentence. Returns null when the analyzer produces no tokens,
 * which callers count as a rejected line.
 */
export function tagSentence(
	analyzer: Analyzer,
	id: string,
	text: string,
): TaggedRecord | null {
	const morphemes = analyzer.tokenize(text);
	if (morphemes.length === 0) {
		return null;
	}
	const tokens = morphemes.map((m) => ({
		surface: m.surface_form,
		pos: toUniversalPos(m.pos, m.pos_detail_1),
	}));
	const record: TaggedRecord = {
		id,
		text,
		tokens,
		noun_chunks: nounChunkSpans(tokens.map((t): UposTag => t.pos)),
	};
	validateRecord(record);
	return record;
}

/**
 * Tag every non-empty line of a corpus. Ids are `line-<n>` with n the
 * 1-based line number in the input, so blank lines leave gaps rather than
 * renumbering. A trailing \r per line is tolerated (CRLF input).
 */
export function tagCorpus(analyzer: Analyzer, input: string): CorpusResult {
	const records: TaggedRecord[] = [];
	let skipped = 0;
	const lines = input.split('\n');
	for (let i = 0; i < lines.length; i++) {
		let line = lines[i]!;
		if (line.endsWith('\r')) {
			line = line.slice(0, -1);
		}
		if (line === '') {
			continue;
		}
		let record: TaggedRecord | null;
		try {
			record = tagSentence(analyzer, `line-${i + 1}`, line);
		} catch {
			record = null;
		}
		if (record === null) {
			skipped++;
		} else {
			records.push(record);
		}
	}
	return { records, skipped };
}
