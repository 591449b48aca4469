/**
 * Typed client for the tutoring service HTTP API.
 *
 * The base URL is configurable (default: same origin, or ?api=... query
 * parameter) so the dev server can talk to a locally running backend.
 */

export interface ExerciseSummary {
    id: string;
    title: string;
    description: string;
    starter_code: string;
}

export interface Session {
    session_id: string;
    participant_alias: string;
    exercise_id: string;
    started_at: number;
}

export interface Hint {
    hint_id: string;
    session_id: string;
    text: string;
    model_id: string;
    created_at: number;
}

export interface Rating {
    clear: number;
    fits: number;
    helpful: number;
    comment?: string;
}

export interface TestOutcome {
    name: string;
    passed: boolean;
    actual_stdout: string;
    stderr: string;
    timed_out: boolean;
}

export interface CheckResult {
    passed: boolean;
    per_test: TestOutcome[];
}

export class ApiError extends Error {
    constructor(
        message: string,
        readonly status: number | null = null,
    ) {
        super(message);
        this.name = 'ApiError';
    }
}

async function requestJson<T>(url: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
        response = await fetch(url, init);
    } catch (err) {
        throw new ApiError(`server unreachable: ${String(err)}`);
    }
    if (!response.ok) {
        let detail = response.statusText;
        try {
            const body = await response.json();
            if (body && typeof body.detail === 'string') detail = body.detail;
        } catch {
            // non-JSON error body; keep the status text
        }
        throw new ApiError(detail, response.status);
    }
    return (await response.json()) as T;
}

export class ApiClient {
    constructor(readonly baseUrl: string = '') {}

    private url(path: string): string {
        return `${this.baseUrl}${path}`;
    }

    listExercises(): Promise<ExerciseSummary[]> {
        return requestJson<ExerciseSummary[]>(this.url('/api/exercises'));
    }

    startSession(exerciseId: string, participantAlias?: string): Promise<Session> {
        return requestJson<Session>(this.url('/api/sessions'), {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify({
                exercise_id: exerciseId,
                participant_alias: participantAlias ?? null,
            }),
        });
    }

    requestHint(sessionId: string, source: string): Promise<Hint> {
        return requestJson<Hint>(this.url(`/api/sessions/${sessionId}/hints`), {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify({ source }),
        });
    }

    rateHint(hintId: string, rating: Rating): Promise<{ status: string }> {
        return requestJson<{ status: string }>(this.url(`/api/hints/${hintId}/rating`), {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify(rating),
        });
    }

    check(sessionId: string, source: string): Promise<CheckResult> {
        return requestJson<CheckResult>(this.url(`/api/sessions/${sessionId}/check`), {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify({ source }),
        });
    }

    /** Raw NDJSON export, one event per line. */
    async exportEvents(session: string = 'all'): Promise<string> {
        let response: Response;
        try {
            response = await fetch(this.url(`/api/export?session=${session}`));
        } catch (err) {
            throw new ApiError(`server unreachable: ${String(err)}`);
        }
        if (!response.ok) throw new ApiError(response.statusText, response.status);
        return response.text();
    }
}
