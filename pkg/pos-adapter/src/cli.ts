#!/usr/bin/env node

import * as fs from 'fs';

import { recordToJson } from './interchange';

const USAGE = 'usage: tag-corpus --in FILE --out FILE [--dict DIR]';

interface Args {
	inPath: string;
	outPath: string;
	dictDir?: string;
}

class UsageError extends Error {}
class HelpRequested extends Error {}

function parseArgs(argv: string[]): Args {
	let inPath: string | undefined;
	let outPath: string | undefined;
	let dictDir: string | undefined;
	for (let i = 0; i < argv.length; i++) {
		const flag = argv[i]!;
		if (flag === '--help' || flag === '-h') {
			throw new HelpRequested();
		}
		if (flag !== '--in' && flag !== '--out' && flag !== '--dict') {
			throw new UsageError(`unknown argument ${flag}`);
		}
		const value = argv[i + 1];
		if (value === undefined) {
			throw new UsageError(`${flag} requires a value`);
		}
		if (flag === '--in') inPath = value;
		else if (flag === '--out') outPath = value;
		else dictDir = value;
		i++;
	}
	if (!inPath || !outPath) {
		throw new UsageError('--in and --out are required');
	}
	return { inPath, outPath, dictDir };
}

/** Run the CLI; returns the process exit code. */
export async function runCli(
	argv: string[],
	stdout: NodeJS.WritableStream = process.stdout,
	stderr: NodeJS.WritableStream = process.stderr,
): Promise<number> {
	let args: Args;
	try {
		args = parseArgs(argv);
	} catch (err) {
		if (err instanceof HelpRequested) {
			stdout.write(USAGE + '\n');
			return 0;
		}
		stderr.write(`tag-corpus: ${message(err)}\n${USAGE}\n`);
		return 2;
	}

	let input: string;
	try {
		input = fs.readFileSync(args.inPath, 'utf-8');
	} catch (err) {
		stderr.write(`tag-corpus: cannot read ${args.inPath}: ${message(err)}\n`);
		return 1;
	}

	// load the tagger module lazily: if the analyzer package itself is not
	// installed this rejects and becomes a diagnostic, not a startup crash
	let tagger: typeof import('./tagger');
	try {
		tagger = await import('./tagger');
	} catch (err) {
		stderr.write(`tag-corpus: analyzer unavailable: ${message(err)}\n`);
		return 1;
	}

	let analyzer;
	try {
		analyzer = await tagger.loadAnalyzer(args.dictDir);
	} catch (err) {
		stderr.write(`tag-corpus: ${message(err)}\n`);
		return 1;
	}

	const { records, skipped } = tagger.tagCorpus(analyzer, input);
	const body = records.map((r) => recordToJson(r) + '\n').join('');
	try {
		fs.writeFileSync(args.outPath, body, 'utf-8');
	} catch (err) {
		stderr.write(`tag-corpus: cannot write ${args.outPath}: ${message(err)}\n`);
		return 1;
	}

	stdout.write(JSON.stringify({ records: records.length, skipped }) + '\n');
	return 0;
}

function message(err: unknown): string {
	return err instanceof Error ? err.message : String(err);
}

if (typeof require !== 'undefined' && require.main === module) {
	runCli(process.argv.slice(2)).then((code) => {
		process.exitCode = code;
	});
}
