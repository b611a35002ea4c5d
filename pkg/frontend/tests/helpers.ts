import { createHmac, randomUUID } from 'node:crypto';

import { DataTagsClient } from '../src/api.js';

/** Proof for the second authentication factor, mirroring the server's scheme. */
export function otpProof(secret: string, token: string): string {
  return createHmac('sha256', secret).update(token).digest('hex').slice(0, 8);
}

export const ANSWERS: Record<string, Record<string, boolean>> = {
  blue: { personal_data: false },
  green: { personal_data: true, special_category: false, reuse_consent_or_information: true },
  yellow: { personal_data: true, special_category: false, reuse_consent_or_information: false },
  orange: {
    personal_data: true,
    special_category: true,
    health_or_genetic: true,
    specialty_scoped_consent: true,
  },
  red: {
    personal_data: true,
    special_category: true,
    health_or_genetic: true,
    specialty_scoped_consent: false,
  },
  purple: {
    personal_data: true,
    special_category: true,
    health_or_genetic: false,
    area_scoped_consent: true,
  },
  notag: {
    personal_data: true,
    special_category: true,
    health_or_genetic: false,
    area_scoped_consent: false,
  },
};

export function uniqueName(prefix: string): string {
  return `${prefix}-${randomUUID().slice(0, 8)}`;
}

export async function makeDepositor(client: DataTagsClient): Promise<{ token: string; id: string }> {
  const username = uniqueName('depositor');
  const record = await client.registerUser(username, `pw-${username}`, 'depositor');
  const login = await client.login(username, `pw-${username}`);
  const escalated = await client.satisfyFactor(login.token, otpProof(record.otp_secret, login.token));
  return { token: escalated.token, id: record.id };
}

export async function makeReader(client: DataTagsClient): Promise<{ token: string; id: string }> {
  const username = uniqueName('reader');
  const record = await client.registerUser(username, `pw-${username}`, 'reader');
  const login = await client.login(username, `pw-${username}`);
  return { token: login.token, id: record.id };
}

export async function depositDataset(
  client: DataTagsClient,
  token: string,
  tag: string,
  title?: string,
): Promise<string> {
  const record = await client.deposit(token, {
    metadata: { title: title ?? `${tag} dataset` },
    payload_base64: Buffer.from('participant,value\np1,4\n').toString('base64'),
    answers: ANSWERS[tag],
  });
  return record['id'] as string;
}

/** Poll until the assertion stops throwing; real clicks resolve asynchronously. */
export async function waitFor(check: () => void, timeoutMs = 5_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = new Error('waitFor never ran');
  while (Date.now() < deadline) {
    try {
      check();
      return;
    } catch (error) {
      lastError = error;
      await new Promise((resolve) => setTimeout(resolve, 50));
    }
  }
  throw lastError;
}
