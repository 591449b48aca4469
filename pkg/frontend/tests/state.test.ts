import { describe, expect, it } from 'vitest';

import type { ExerciseSummary, Hint, Session } from '../src/api';
import { SessionStore, validRating } from '../src/state';

const exercise: ExerciseSummary = {
    id: 'clumps',
    title: 'Clumps',
    description: 'Count the clumps.\n\nInput: n values.\n\nOutput: the count.',
    starter_code: '# Write your solution here\n',
};

const session: Session = {
    session_id: 's-1',
    participant_alias: '123',
    exercise_id: 'clumps',
    started_at: 1,
};

function hint(id: string): Hint {
    return { hint_id: id, session_id: 's-1', text: `hint ${id}`, model_id: 'mock', created_at: 2 };
}

describe('SessionStore', () => {
    it('loads starter code when a session begins', () => {
        const store = new SessionStore();
        store.beginSession(exercise, session);
        expect(store.buffer).toBe(exercise.starter_code);
        expect(store.sessionActive).toBe(true);
        expect(store.bufferDirty).toBe(false);
    });

    it('tracks buffer edits as dirty', () => {
        const store = new SessionStore();
        store.beginSession(exercise, session);
        store.buffer = 'print(1)\n';
        expect(store.bufferDirty).toBe(true);
    });

    it('marks a new hint unrated and blocks on its rating', () => {
        const store = new SessionStore();
        store.beginSession(exercise, session);
        store.receiveHint(hint('h1'));
        expect(store.hints).toHaveLength(1);
        expect(store.hints[0].rated).toBe(false);
        expect(store.ratingFor).toBe('h1');
        expect(store.unratedCount).toBe(1);
    });

    it('clears the block when the rating is submitted', () => {
        const store = new SessionStore();
        store.beginSession(exercise, session);
        store.receiveHint(hint('h1'));
        store.markRated('h1');
        expect(store.hints[0].rated).toBe(true);
        expect(store.ratingFor).toBeNull();
        expect(store.unratedCount).toBe(0);
    });

    it('records explicit skips locally so none are lost silently', () => {
        const store = new SessionStore();
        store.beginSession(exercise, session);
        store.receiveHint(hint('h1'));
        store.markSkipped('h1');
        expect(store.ratingFor).toBeNull();
        expect(store.skips.map((s) => s.hint_id)).toEqual(['h1']);
        expect(store.unratedCount).toBe(0);
    });

    it('keeps the full hint history across requests', () => {
        const store = new SessionStore();
        store.beginSession(exercise, session);
        store.receiveHint(hint('h1'));
        store.markRated('h1');
        store.receiveHint(hint('h2'));
        expect(store.hints.map((h) => h.hint_id)).toEqual(['h1', 'h2']);
    });

    it('resets history when a new session starts', () => {
        const store = new SessionStore();
        store.beginSession(exercise, session);
        store.receiveHint(hint('h1'));
        store.beginSession(exercise, { ...session, session_id: 's-2' });
        expect(store.hints).toEqual([]);
        expect(store.lastCheck).toBeNull();
    });
});

describe('validRating', () => {
    it('accepts in-range integer scores', () => {
        expect(validRating(1, 3, 5)).toBe(true);
    });

    it('rejects out-of-range or fractional scores', () => {
        expect(validRating(0, 3, 5)).toBe(false);
        expect(validRating(1, 6, 5)).toBe(false);
        expect(validRating(1, 2.5, 5)).toBe(false);
    });
});
