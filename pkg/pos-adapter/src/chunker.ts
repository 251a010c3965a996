import type { UposTag } from './interchange';

const CHUNKABLE: ReadonlySet<UposTag> = new Set(['NOUN', 'PROPN', 'NUM']);

/**
 * Noun-chunk spans as maximal runs of noun, proper-noun, and numeral tokens.
 *
 * The analyzer has no noun-phrase facility of its own, so contiguous nominal
 * runs stand in for noun phrases. Returned spans are half-open token-index
 * pairs, sorted and non-overlapping by construction.
 */
export function nounChunkSpans(tags: readonly UposTag[]): Array<[number, number]> {
	const spans: Array<[number, number]> = [];
	let start = -1;
	for (let i = 0; i <= tags.length; i++) {
		const inRun = i < tags.length && CHUNKABLE.has(tags[i]!);
		if (inRun && start < 0) {
			start = i;
		} else if (!inRun && start >= 0) {
			spans.push([start, i]);
			start = -1;
		}
	}
	return spans;
}
